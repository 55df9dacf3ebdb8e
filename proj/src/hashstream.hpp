#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "common.hpp"

namespace hpt {

// FNV-1a 64
uint64_t digest_bytes(const void* data, size_t len);

inline uint64_t digest_bytes(const std::string& s) { return digest_bytes(s.data(), s.size()); }

// 64-bit word `block` of the stream keyed by (key, digest)
inline uint64_t stream_word(uint64_t key, uint64_t digest, uint64_t block) {
  return mix64((key ^ digest) + block * kGolden);
}

// bit `index` of the stream, MSB-first within each word
inline int stream_bit(uint64_t key, uint64_t digest, uint64_t index) {
  uint64_t w = stream_word(key, digest, index >> 6);
  return int((w >> (63 - (index & 63))) & 1u);
}

enum class CorpusFormat { Lines, RawU64 };

struct Corpus {
  std::vector<std::string> records;  // element bytes as read
  std::vector<uint64_t> digests;
  size_t duplicates = 0;  // records whose digest repeats an earlier one
};

Corpus ingest(std::istream& in, CorpusFormat fmt);
Corpus ingest_file(const std::string& path, CorpusFormat fmt);  // "-" reads stdin

}  // namespace hpt
