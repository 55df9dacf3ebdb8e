#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bloom.hpp"
#include "doctest.h"

using namespace hpt;

namespace {

double ref_fp(double n, double m, double k) {
  return std::pow(1.0 - std::pow(1.0 - 1.0 / m, k * n), k);
}

}  // namespace

TEST_CASE("false positive formula") {
  CHECK(bloom_fp(1000, 14478, 10) == doctest::Approx(ref_fp(1000, 14478, 10)).epsilon(1e-12));
  CHECK(bloom_fp(100, 958, 7) == doctest::Approx(ref_fp(100, 958, 7)).epsilon(1e-12));
  CHECK(bloom_fp(1, 1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  // ~ (1 - e^{-kn/m})^k for large m
  CHECK(bloom_fp(1000, 1 << 20, 4) ==
        doctest::Approx(std::pow(-std::expm1(-4000.0 / (1 << 20)), 4.0)).epsilon(1e-3));
}

TEST_CASE("optimal k minimizes the formula") {
  for (auto [n, m] : {std::pair<uint64_t, uint64_t>{100, 958},
                      {1000, 9585},
                      {1000, 14427},
                      {50, 1000},
                      {7, 7}}) {
    uint32_t k = optimal_k(n, m);
    double best = bloom_fp(n, m, k);
    for (uint32_t cand = 1; cand <= 40; ++cand)
      CHECK(best <= bloom_fp(n, m, cand) * (1 + 1e-12));
  }
}

TEST_CASE("bits per element at the information optimum") {
  // -lg p / ln 2 = 1.44 lg(1/p)
  CHECK(bloom_bits_per_element(0.01) ==
        doctest::Approx(-std::log2(0.01) / std::log(2.0)).epsilon(1e-12));
  CHECK(bloom_bits_per_element(0.5) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(bloom_bits_per_element(0.0), Error);
  CHECK_THROWS_AS(bloom_bits_per_element(1.0), Error);
}

TEST_CASE("filter has no false negatives") {
  BloomFilter f(20000, 7, 3);
  SplitMix rng{55};
  std::vector<uint64_t> members;
  for (int i = 0; i < 2000; ++i) members.push_back(rng.next());
  for (uint64_t d : members) f.insert(d);
  for (uint64_t d : members) CHECK(f.query(d));
  CHECK(f.m_bits() == 20000);
  CHECK(f.k() == 7);
}

TEST_CASE("empirical rate matches the formula") {
  const uint64_t n = 1000, m = 14478;
  const uint32_t k = 10;
  EnsembleFp r = simulate_bloom_fp(n, m, k, 4, 200000, 0, 99);
  double expect = bloom_fp(n, m, k);
  // ~1e-3 rate, 8e5 probes: the binomial error dominates
  double sigma = std::sqrt(expect * (1 - expect) / (4.0 * 200000));
  CHECK(std::abs(r.mean - expect) < 5 * sigma + 5 * r.stderr_mean);
}

TEST_CASE("degenerate parameters are rejected") {
  CHECK_THROWS_AS(BloomFilter(0, 3, 0), Error);
  CHECK_THROWS_AS(BloomFilter(100, 0, 0), Error);
  CHECK_THROWS_AS(bloom_fp(10, 0, 3), Error);
  CHECK_THROWS_AS(optimal_k(0, 100), Error);
}
