#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "common.hpp"

namespace hpt {

// All entropies are in bits (lg = log2). Conventions follow the recurrences:
//   h_n   split entropy of a node holding n streams
//   H_n   expected bits for a minimal tree of n streams, H_0 = H_1 = 0
//   H'_n  same for the reduced tree (degree-1 directions erased)
//   H^d_n minimal tree with every leaf extended to depth >= d
//   D_n   expected leaf depth, n*D_n = H_n + lg n!
//   L^d_n expected number of leaves at depth d, l^d_n = L^d_n / n
//   F^l_n false-positive probability of a random non-member probe

constexpr double kGammaEuler = 0.57721566490153286061;
constexpr double kLgE = 1.44269504088896340736;
// limit of D_{n+1} - lg n:  1/2 + gamma*lg e
constexpr double kDepthOffset = 1.3327461772768672;
// limit of F_n:  lg(e)/2
constexpr double kFpLimit = 0.72134752044448170368;

struct EvalConfig {
  uint32_t n_max_exact = 4096;  // O(n^2) recurrences refuse larger n
  double tail_tol = 1e-15;      // relative cutoff for infinite depth sums
};

struct ApproxParams {
  double alpha = 0.5 + (1.0 + kGammaEuler) * kLgE;  // 2.77544121816583
  double epsilon = 1.6e-6;
  double delta = 0.88;
};

double log_factorial(uint64_t n);             // lg n!
double log_binomial(uint64_t n, uint64_t k);  // lg C(n,k)

double split_entropy(uint64_t n);          // h_n
double reduced_split_entropy(uint64_t n);  // h'_n = h_n - 2^{1-n}
double approx_split_entropy(uint64_t n);   // (1/2) lg(pi e n / 2)

// exact sum D_n = sum_d 1-(1-2^{-d})^{n-1}; works for any n
double avg_depth_sum(uint64_t n, double tail_tol = 1e-15);
// Euler-Maclaurin approximation of D_{n+1}; terms = number of 1/n corrections (0..3)
double approx_avg_depth(uint64_t n, int terms);
// smooth part only (no oscillation): used for residual plots
double avg_depth_smooth(uint64_t n);

double tree_entropy_closed(uint64_t n);  // n*D_n - lg n!
double approx_tree_entropy(uint64_t n, const ApproxParams& p = {});
double tree_entropy_smooth(uint64_t n);  // approx without the oscillation term

double leaf_depth_pmf(uint64_t n, uint32_t d);   // l^d_n, n >= 2, d >= 1
double expected_leaves(uint64_t n, uint32_t d);  // L^d_n
double min_depth_entropy_closed(uint64_t n, uint32_t d);

double false_positive(uint64_t n, uint32_t d_min, double tail_tol = 1e-15);
double internal_nodes_at_depth(uint64_t n, uint32_t d, double tail_tol = 1e-15);
double m_node_count(uint64_t n, uint64_t m, double tail_tol = 1e-15);  // N_n^m, m >= 2
double degree1_count(uint64_t n, double tail_tol = 1e-15);
double degree1_bits(uint64_t n, double tail_tol = 1e-15);  // sum_m 2^{1-m} N_n^m
double reduced_entropy_closed(uint64_t n);                 // H_n - degree1_bits

// memoized exact recurrences, capped at cfg.n_max_exact
class Evaluator {
public:
  explicit Evaluator(EvalConfig cfg = {});
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const EvalConfig& config() const;

  double split_entropy(uint32_t n);                    // h_n (cached)
  double tree_entropy(uint32_t n);                     // H_n
  double reduced_entropy(uint32_t n);                  // H'_n
  double avg_depth(uint32_t n);                        // D_n
  double min_depth_entropy(uint32_t n, uint32_t d);    // H^d_n
  const std::vector<double>& binom_pmf(uint32_t n);    // C(n,k)/2^n row

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hpt
