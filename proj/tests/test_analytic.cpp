#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "analytic.hpp"
#include "doctest.h"

using namespace hpt;

namespace {

// long-double reference for lg C(n,k), accurate to ~1e-17 rel
double ref_log_binomial(uint64_t n, uint64_t k) {
  long double s = 0;
  if (k > n - k) k = n - k;
  for (uint64_t i = 0; i < k; ++i)
    s += logl((long double)(n - i)) - logl((long double)(i + 1));
  return double(s / logl(2.0L));
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("log factorial and binomial") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(log_factorial(5) == doctest::Approx(std::log2(120.0)).epsilon(1e-12));
  CHECK(log_binomial(10, 3) == doctest::Approx(std::log2(120.0)).epsilon(1e-12));
  CHECK(log_binomial(1000, 500) ==
        doctest::Approx(ref_log_binomial(1000, 500)).epsilon(1e-9));
  CHECK(log_binomial(100000, 1234) ==
        doctest::Approx(ref_log_binomial(100000, 1234)).epsilon(1e-9));
  CHECK(log_binomial(7, 0) == 0.0);
  CHECK(log_binomial(7, 7) == 0.0);
}

TEST_CASE("split entropy small values") {
  CHECK(split_entropy(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(split_entropy(2) == doctest::Approx(1.5).epsilon(1e-12));
  // h_3 = entropy of Binomial(3,1/2) : 2*(3/8)*lg(8/3) + 2*(1/8)*3
  double h3 = 2 * (3.0 / 8) * std::log2(8.0 / 3) + 2 * (1.0 / 8) * 3;
  CHECK(split_entropy(3) == doctest::Approx(h3).epsilon(1e-12));
  CHECK(reduced_split_entropy(3) == doctest::Approx(h3 - 0.25).epsilon(1e-12));
  CHECK(reduced_split_entropy(1) == 0.0);
  // the asymptotic form closes in from above
  CHECK(approx_split_entropy(4096) == doctest::Approx(split_entropy(4096)).epsilon(1e-4));
}

TEST_CASE("recurrences match closed forms") {
  Evaluator ev;
  for (uint32_t n : {2u, 3u, 5u, 17u, 64u, 200u, 512u}) {
    CHECK(close_rel(ev.tree_entropy(n), tree_entropy_closed(n), 1e-6));
    CHECK(close_rel(ev.reduced_entropy(n), reduced_entropy_closed(n), 1e-6));
    CHECK(close_rel(ev.avg_depth(n), avg_depth_sum(n), 1e-9));
    CHECK(close_rel(ev.split_entropy(n), split_entropy(n), 1e-12));
  }
  for (uint32_t n : {2u, 3u, 16u, 100u, 256u})
    for (uint32_t d : {1u, 2u, 5u, 12u, 20u})
      CHECK(close_rel(ev.min_depth_entropy(n, d), min_depth_entropy_closed(n, d), 1e-6));
}

TEST_CASE("depth identity ties the three quantities") {
  // H_n + lg n! = n D_n
  Evaluator ev;
  for (uint32_t n : {2u, 3u, 10u, 77u, 512u})
    CHECK(close_rel(ev.tree_entropy(n) + log_factorial(n), n * ev.avg_depth(n), 1e-9));
}

TEST_CASE("degree-1 bits close the reduced gap") {
  // H_n - H'_n = sum_m 2^{1-m} N^m_n
  Evaluator ev;
  for (uint32_t n : {3u, 8u, 23u, 64u}) {
    double gap = ev.tree_entropy(n) - ev.reduced_entropy(n);
    CHECK(close_rel(gap, degree1_bits(n), 1e-6));
  }
}

TEST_CASE("leaf depth pmf is a distribution") {
  for (uint64_t n : {2ull, 5ull, 17ull, 100ull, 1000ull}) {
    double sum = 0, leaves = 0, mean = 0;
    for (uint32_t d = 1; d < 200; ++d) {
      double p = leaf_depth_pmf(n, d);
      sum += p;
      mean += d * p;
      leaves += expected_leaves(n, d);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(leaves == doctest::Approx(double(n)).epsilon(1e-12));
    CHECK(mean == doctest::Approx(avg_depth_sum(n)).epsilon(1e-9));
  }
}

TEST_CASE("min-depth entropy decomposes into extension chains") {
  // H^d_n = H_n + sum_{i=1}^{d-1} i n l^{d-i}_n
  Evaluator ev;
  for (uint32_t n : {2u, 9u, 50u, 256u}) {
    for (uint32_t d : {2u, 7u, 15u, 20u}) {
      double chains = 0;
      for (uint32_t i = 1; i < d; ++i) chains += double(i) * n * leaf_depth_pmf(n, d - i);
      CHECK(close_rel(ev.min_depth_entropy(n, d), ev.tree_entropy(n) + chains, 1e-6));
    }
  }
}

TEST_CASE("false positive rate") {
  CHECK(false_positive(1, 0) == 1.0);
  CHECK(false_positive(2, 0) == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK(false_positive(1000, 0) == doctest::Approx(kFpLimit).epsilon(1e-4));
  CHECK(false_positive(100000, 0) == doctest::Approx(kFpLimit).epsilon(1e-6));
  // deeper minimum depth multiplies the rate down by ~2 per level
  double prev = false_positive(100, 0);
  for (uint32_t d = 5; d <= 40; d += 5) {
    double f = false_positive(100, d);
    CHECK(f < prev);
    prev = f;
  }
  CHECK(false_positive(100, 40) == doctest::Approx(100.0 / 2.0 * std::pow(2.0, -40) * 2)
                                       .epsilon(1e-2));  // ~ n 2^{-d} for deep d
}

TEST_CASE("node-count sums") {
  // internal nodes at all depths total n-1 two-way splits plus degree-1 chains
  for (uint64_t n : {5ull, 32ull, 200ull}) {
    double deg1 = 0;
    for (uint64_t m = 2; m <= n; ++m) deg1 += m_node_count(n, m) * std::pow(2.0, 1.0 - double(m));
    CHECK(close_rel(deg1, degree1_bits(n), 1e-9));
    CHECK(degree1_count(n) < n);
  }
  // the density settles near lg(e)/2 - 0.279... = 0.4427 per element
  CHECK(degree1_count(10000) / 10000.0 == doctest::Approx(0.442695).epsilon(1e-3));
}

TEST_CASE("asymptotic approximations track the exact values") {
  Evaluator ev;
  for (uint32_t n : {64u, 256u, 1024u}) {
    CHECK(close_rel(approx_tree_entropy(n), ev.tree_entropy(n), 1e-4));
    CHECK(std::abs(avg_depth_smooth(n) - avg_depth_sum(n)) < 1e-5);
    // the residual is dominated by the periodic term the smooth form drops
    CHECK(std::abs(approx_avg_depth(n, 3) - avg_depth_sum(n + 1)) < 1e-5);
  }
  // smooth parts strip the oscillation but keep the trend
  CHECK(std::abs(tree_entropy_smooth(512) - tree_entropy_closed(512)) < 0.01);
  CHECK(avg_depth_smooth(1 << 20) ==
        doctest::Approx(20.0 + kDepthOffset).epsilon(1e-5));
}

TEST_CASE("reference grid spot values") {
  Evaluator ev;
  CHECK(std::abs(ev.tree_entropy(3) - 5.415) < 0.0005 + 1e-9);
  CHECK(std::abs(ev.reduced_entropy(20) - 42.4349) < 0.0005);
  CHECK(std::abs(ev.min_depth_entropy(3, 20) - 57.4150) < 0.0005);
  CHECK(std::abs(ev.min_depth_entropy(2000, 20) - 20954.6) < 0.05);
  CHECK(std::abs(ev.reduced_entropy(1000) - 2325.72) < 0.005);
  CHECK(std::abs(approx_tree_entropy(1) - 0.7283) < 0.0005);
  CHECK(std::abs(avg_depth_sum(10) - 4.581) < 0.0005);
}

TEST_CASE("domain and capacity errors") {
  Evaluator ev;
  CHECK_THROWS_AS(ev.tree_entropy(5000), Error);  // above n_max_exact
  CHECK_THROWS_AS(leaf_depth_pmf(1, 3), Error);
  CHECK_THROWS_AS(m_node_count(10, 1), Error);
  CHECK(ev.config().n_max_exact == 4096);
}

TEST_CASE("binomial pmf rows") {
  Evaluator ev;
  const auto& row = ev.binom_pmf(6);
  REQUIRE(row.size() == 7);
  CHECK(row[0] == doctest::Approx(1.0 / 64).epsilon(1e-12));
  CHECK(row[3] == doctest::Approx(20.0 / 64).epsilon(1e-12));
  double s = 0;
  for (double p : row) s += p;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}
