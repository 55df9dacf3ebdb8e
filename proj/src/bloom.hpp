#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "trie.hpp"

namespace hpt {

// classic Bloom filter; hash i of a digest is stream_word(key, digest, i) mod m
class BloomFilter {
 public:
  BloomFilter(uint64_t m_bits, uint32_t k, uint64_t key);
  void insert(uint64_t digest);
  bool query(uint64_t digest) const;
  uint64_t m_bits() const { return m_; }
  uint32_t k() const { return k_; }

 private:
  uint64_t m_;
  uint32_t k_;
  uint64_t key_;
  std::vector<uint64_t> words_;
};

double bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k);
uint32_t optimal_k(uint64_t n, uint64_t m_bits);

// bits per element a Bloom filter needs (optimal k) for false-positive rate p
double bloom_bits_per_element(double p);

EnsembleFp simulate_bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k, uint32_t trials,
                             uint64_t probes, uint64_t key, uint64_t seed);

}  // namespace hpt
