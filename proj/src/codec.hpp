#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trie.hpp"

namespace hpt {

inline constexpr uint32_t kDefaultScaleBits = 16;
inline constexpr uint32_t kMinScaleBits = 8;
inline constexpr uint32_t kMaxScaleBits = 30;
inline constexpr uint64_t kMaxCodecN = 1ull << 22;

struct Header {
  TreeKind kind = TreeKind::Minimal;
  uint32_t scale_bits = kDefaultScaleBits;
  uint64_t n = 0;
  uint32_t min_depth = 0;
  size_t header_size = 0;
};

void put_uleb(std::vector<uint8_t>& out, uint64_t v);
uint64_t get_uleb(const uint8_t* data, size_t size, size_t& pos);

// split weights for a node of n elements, scaled to integers that sum to
// exactly 2^scale_bits with every entry >= 1 (largest-remainder, low k wins
// ties); Minimal/MinDepth: k = 0..n; Reduced: [degree-1, k = 1..n-1]
std::vector<uint32_t> quantize_split(uint64_t n, TreeKind kind, uint32_t scale_bits);

// content_bits (optional out): information coded before byte flush
std::vector<uint8_t> encode_tree(const PrefixTree& tree, uint32_t scale_bits = kDefaultScaleBits,
                                 double* content_bits = nullptr);
PrefixTree decode_tree(const uint8_t* data, size_t size);
Header peek_header(const uint8_t* data, size_t size);

struct RateStats {
  double mean_payload_bits = 0.0;
  double se_payload_bits = 0.0;
  double mean_content_bits = 0.0;
  double mean_total_bits = 0.0;
  uint32_t trials = 0;
};

// encodes freshly sampled trees and reports the achieved size
RateStats measure_rate(uint64_t n, TreeKind kind, uint32_t min_depth, uint32_t trials,
                       uint32_t scale_bits, uint64_t key, uint64_t seed);

}  // namespace hpt
