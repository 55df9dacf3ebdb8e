#include "bloom.hpp"

#include <cmath>
#include <unordered_set>

#include "hashstream.hpp"

namespace hpt {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

BloomFilter::BloomFilter(uint64_t m_bits, uint32_t k, uint64_t key)
    : m_(m_bits), k_(k), key_(key), words_((m_bits + 63) / 64, 0) {
  if (m_bits == 0 || k == 0) fail(Err::Domain, "filter needs m_bits >= 1 and k >= 1");
}

void BloomFilter::insert(uint64_t digest) {
  for (uint32_t i = 0; i < k_; ++i) {
    uint64_t idx = stream_word(key_, digest, i) % m_;
    words_[idx >> 6] |= 1ull << (idx & 63);
  }
}

bool BloomFilter::query(uint64_t digest) const {
  for (uint32_t i = 0; i < k_; ++i) {
    uint64_t idx = stream_word(key_, digest, i) % m_;
    if (!(words_[idx >> 6] & (1ull << (idx & 63)))) return false;
  }
  return true;
}

double bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k) {
  if (n == 0 || m_bits == 0 || k == 0) fail(Err::Domain, "n, m_bits, k must all be >= 1");
  // (1 - (1 - 1/m)^(kn))^k without cancellation
  double inner = double(k) * double(n) * std::log1p(-1.0 / double(m_bits));
  double one_minus = -std::expm1(inner);
  return std::exp(double(k) * std::log(one_minus));
}

uint32_t optimal_k(uint64_t n, uint64_t m_bits) {
  if (n == 0 || m_bits == 0) fail(Err::Domain, "n and m_bits must be >= 1");
  double raw = double(m_bits) / double(n) * kLn2;
  uint32_t lo = uint32_t(std::max(1.0, std::floor(raw)));
  uint32_t hi = uint32_t(std::max(1.0, std::ceil(raw)));
  return bloom_fp(n, m_bits, lo) <= bloom_fp(n, m_bits, hi) ? lo : hi;
}

double bloom_bits_per_element(double p) {
  if (!(p > 0.0) || p >= 1.0) fail(Err::Domain, "false-positive rate must lie in (0,1)");
  return -std::log2(p) / kLn2;
}

EnsembleFp simulate_bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k, uint32_t trials,
                             uint64_t probes, uint64_t key, uint64_t seed) {
  if (trials == 0 || probes == 0) fail(Err::Domain, "trials and probes must be >= 1");
  std::vector<double> rates(trials);
  for_each_trial(trials, [&](uint32_t t) {
    auto digests = random_digests(n, trial_seed(seed, 2 * t));
    BloomFilter f(m_bits, k, key);
    std::unordered_set<uint64_t> members(digests.begin(), digests.end());
    for (uint64_t d : digests) f.insert(d);
    SplitMix rng(trial_seed(seed, 2 * t + 1));
    uint64_t hits = 0;
    for (uint64_t i = 0; i < probes; ++i) {
      uint64_t d = rng.next();
      while (members.count(d)) d = rng.next();
      hits += f.query(d) ? 1 : 0;
    }
    rates[t] = double(hits) / double(probes);
  });
  Moments m;
  for (double r : rates) m.add(r);
  return {m.mean(), m.se(), trials};
}

}  // namespace hpt
