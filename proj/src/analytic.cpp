#include "analytic.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace hpt {

namespace {

constexpr double kHalfLgPiE2 = 1.04709558958881971268;  // (1/2) lg(pi*e/2)

double lg_choose_small(uint64_t n, uint64_t kk) {
  // kk = min(k, n-k) <= 8: sum of correctly rounded logs beats lgamma here
  double s = 0.0;
  for (uint64_t i = 0; i < kk; ++i)
    s += std::log2(double(n - i)) - std::log2(double(i + 1));
  return s;
}

}  // namespace

double log_factorial(uint64_t n) { return std::lgamma(double(n) + 1.0) * kLgE; }

double log_binomial(uint64_t n, uint64_t k) {
  if (k > n) fail(Err::Domain, "log_binomial: k > n");
  uint64_t kk = std::min(k, n - k);
  if (kk == 0) return 0.0;
  if (kk <= 8) return lg_choose_small(n, kk);
  return (std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
          std::lgamma(double(n - k) + 1.0)) *
         kLgE;
}

double split_entropy(uint64_t n) {
  if (n == 0) return 0.0;
  double lgn1 = std::lgamma(double(n) + 1.0);
  double h = 0.0;
  for (uint64_t k = 0; k <= n; ++k) {
    double lgp = (lgn1 - std::lgamma(double(k) + 1.0) - std::lgamma(double(n - k) + 1.0)) * kLgE -
                 double(n);
    double p = std::exp2(lgp);
    if (p > 0.0) h -= p * lgp;
  }
  return h;
}

double reduced_split_entropy(uint64_t n) {
  if (n == 0) fail(Err::Domain, "reduced_split_entropy: n >= 1 required");
  return split_entropy(n) - std::ldexp(1.0, 1 - int(std::min<uint64_t>(n, 2000)));
}

double approx_split_entropy(uint64_t n) {
  if (n == 0) fail(Err::Domain, "approx_split_entropy: n >= 1 required");
  return kHalfLgPiE2 + 0.5 * std::log2(double(n));
}

double avg_depth_sum(uint64_t n, double tail_tol) {
  if (n <= 1) return 0.0;
  double nm1 = double(n - 1);
  double s = 1.0;  // d = 0 term
  double lgn = std::log2(double(n));
  for (uint32_t d = 1;; ++d) {
    double t = -std::expm1(nm1 * std::log1p(-std::exp2(-double(d))));
    s += t;
    if (double(d) > lgn + 10.0 && t < tail_tol * s) break;
    if (d > 4000) break;
  }
  return s;
}

double approx_avg_depth(uint64_t n, int terms) {
  if (n == 0) fail(Err::Domain, "approx_avg_depth: n >= 1 required");
  if (terms < 0 || terms > 3)
    fail(Err::Domain, "approx_avg_depth: series diverges past the 1/120n^4 term");
  double x = double(n);
  double corr = kGammaEuler;
  if (terms >= 1) corr += 1.0 / (2.0 * x);
  if (terms >= 2) corr -= 1.0 / (12.0 * x * x);
  if (terms >= 3) corr += 1.0 / (120.0 * x * x * x * x);
  return 0.5 + std::log2(x) + kLgE * corr;
}

double avg_depth_smooth(uint64_t n) {
  // smooth part of D_n: approximation at n-1 with all three corrections
  if (n < 2) fail(Err::Domain, "avg_depth_smooth: n >= 2 required");
  return approx_avg_depth(n - 1, 3);
}

double tree_entropy_closed(uint64_t n) {
  if (n <= 1) return 0.0;
  return double(n) * avg_depth_sum(n) - log_factorial(n);
}

double approx_tree_entropy(uint64_t n, const ApproxParams& p) {
  if (n == 0) fail(Err::Domain, "approx_tree_entropy: n >= 1 required");
  double lgn = std::log2(double(n));
  return p.alpha * double(n) - 1.0 - kHalfLgPiE2 - 0.5 * lgn +
         p.epsilon * double(n) * std::sin(2.0 * M_PI * lgn + p.delta);
}

double tree_entropy_smooth(uint64_t n) {
  if (n == 0) fail(Err::Domain, "tree_entropy_smooth: n >= 1 required");
  ApproxParams p;
  return p.alpha * double(n) - 1.0 - kHalfLgPiE2 - 0.5 * std::log2(double(n));
}

double leaf_depth_pmf(uint64_t n, uint32_t d) {
  if (n < 2) fail(Err::Domain, "leaf_depth_pmf: n >= 2 required");
  if (d == 0) fail(Err::Domain, "leaf_depth_pmf: d >= 1 required");
  double nm1 = double(n - 1);
  double a = std::exp(nm1 * std::log1p(-std::exp2(-double(d))));
  double b = d == 1 ? 0.0 : std::exp(nm1 * std::log1p(-std::exp2(1.0 - double(d))));
  return a - b;
}

double expected_leaves(uint64_t n, uint32_t d) {
  if (n == 0) fail(Err::Domain, "expected_leaves: n >= 1 required");
  if (n == 1) return d == 0 ? 1.0 : 0.0;
  if (d == 0) return 0.0;
  return double(n) * leaf_depth_pmf(n, d);
}

double min_depth_entropy_closed(uint64_t n, uint32_t d) {
  if (n == 0) fail(Err::Domain, "min_depth_entropy_closed: n >= 1 required");
  if (n == 1) return double(d);
  double s = tree_entropy_closed(n);
  for (uint32_t i = 1; i < d; ++i) s += double(i) * expected_leaves(n, d - i);
  return s;
}

double false_positive(uint64_t n, uint32_t d_min, double tail_tol) {
  if (n == 0) fail(Err::Domain, "false_positive: n >= 1 required");
  if (n == 1 && d_min == 0) return 1.0;  // the root itself is the leaf
  uint32_t start = std::max(d_min, 1u);
  double nm1 = double(n - 1);
  double lgn = std::log2(double(n));
  double s = 0.0;
  for (uint32_t d = start;; ++d) {
    double t = std::exp2(-double(d)) * std::exp(nm1 * std::log1p(-std::exp2(-double(d))));
    s += t;
    if (double(d) > double(start) + lgn + 10.0 && t < tail_tol * s) break;
    if (d > start + 4000) break;
  }
  return 0.5 * double(n) * s;
}

double internal_nodes_at_depth(uint64_t n, uint32_t d, double) {
  if (n == 0) fail(Err::Domain, "internal_nodes_at_depth: n >= 1 required");
  if (d == 0) return n >= 2 ? 1.0 : 0.0;
  double p = std::exp2(-double(d));
  double none = std::exp(double(n) * std::log1p(-p));
  double one = double(n) * p * std::exp(double(n - 1) * std::log1p(-p));
  return std::exp2(double(d)) * (1.0 - none - one);
}

double m_node_count(uint64_t n, uint64_t m, double tail_tol) {
  if (m < 2 || m > n) fail(Err::Domain, "m_node_count: 2 <= m <= n required");
  double s = (m == n) ? 1.0 : 0.0;
  double lgc = log_binomial(n, m);
  double nm = double(n - m);
  double lgn = std::log2(double(n));
  for (uint32_t d = 1;; ++d) {
    double lgt = double(d) * (1.0 - double(m)) + lgc +
                 nm * std::log1p(-std::exp2(-double(d))) * kLgE;
    double t = std::exp2(lgt);
    s += t;
    if (double(d) > lgn + 10.0 && t < tail_tol * s) break;
    if (d > 4000) break;
  }
  return s;
}

double degree1_count(uint64_t n, double tail_tol) {
  if (n <= 1) return 0.0;
  double nd = double(n) * avg_depth_sum(n, tail_tol);
  double lgn = std::log2(double(n));
  double s = 0.0;
  for (uint32_t d = 0;; ++d) {
    double covered =
        d == 0 ? 1.0
               : std::exp2(double(d)) * -std::expm1(double(n) * std::log1p(-std::exp2(-double(d))));
    double t = double(n) - covered;
    s += t;
    if (double(d) > lgn + 10.0 && t < tail_tol * s) break;
    if (d > 4000) break;
  }
  return nd - s - double(n - 1);
}

double degree1_bits(uint64_t n, double tail_tol) {
  if (n <= 1) return 0.0;
  double s = 0.0;
  for (uint64_t m = 2; m <= n; ++m) {
    double t = std::ldexp(m_node_count(n, m, tail_tol), 1 - int(m));
    s += t;
    if (m > 8 && t < tail_tol * s) break;
  }
  return s;
}

double reduced_entropy_closed(uint64_t n) {
  if (n <= 1) return 0.0;
  return tree_entropy_closed(n) - degree1_bits(n);
}

// ---- memoized recurrences ----

struct Evaluator::Impl {
  EvalConfig cfg;
  std::mutex mu;
  std::vector<double> lgf;                                   // lg i!
  std::vector<std::unique_ptr<std::vector<double>>> rows;    // C(n,k)/2^n
  std::vector<double> hn;                                    // split entropies
  std::vector<double> H, Hp, D;
  std::vector<std::vector<double>> levels;                   // H^d levels
  uint32_t levels_n = 1;

  void check_n(uint32_t n) {
    if (n > cfg.n_max_exact)
      fail(Err::Capacity, "exact recurrence beyond n_max_exact=" + std::to_string(cfg.n_max_exact) +
                              "; use the closed forms");
  }

  void ensure_lgf(uint32_t n) {
    size_t old = lgf.size();
    if (old >= size_t(n) + 1) return;
    lgf.resize(size_t(n) + 1);
    if (old == 0) {
      lgf[0] = 0.0;
      old = 1;
    }
    for (size_t i = old; i < lgf.size(); ++i) lgf[i] = std::lgamma(double(i) + 1.0) * kLgE;
  }

  const std::vector<double>& row(uint32_t n) {
    if (rows.size() <= n) rows.resize(size_t(n) + 1);
    if (!rows[n]) {
      ensure_lgf(n);
      auto r = std::make_unique<std::vector<double>>(size_t(n) + 1);
      for (uint32_t k = 0; k <= n; ++k)
        (*r)[k] = std::exp2(lgf[n] - lgf[k] - lgf[n - k] - double(n));
      rows[n] = std::move(r);
    }
    return *rows[n];
  }

  double h(uint32_t n) {
    if (hn.size() <= n) hn.resize(size_t(n) + 1, -1.0);
    if (hn[n] < 0.0) {
      ensure_lgf(n);
      double s = 0.0;
      for (uint32_t k = 0; k <= n; ++k) {
        double lgp = lgf[n] - lgf[k] - lgf[n - k] - double(n);
        double p = std::exp2(lgp);
        if (p > 0.0) s -= p * lgp;
      }
      hn[n] = s;
    }
    return hn[n];
  }

  // H and H' share the recurrence, seeded with h_n or h'_n
  void ensure_entropy(std::vector<double>& T, uint32_t n, bool reduced) {
    if (T.empty()) T = {0.0, 0.0};
    for (uint32_t m = uint32_t(T.size()); m <= n; ++m) {
      const auto& r = row(m);
      double s = 0.0;
      for (uint32_t k = 2; k < m; ++k) s += r[k] * T[k];
      double base = h(m);
      if (reduced) base -= std::ldexp(1.0, 1 - int(m));
      T.push_back((base + 2.0 * s) / (1.0 - std::ldexp(1.0, 1 - int(m))));
    }
  }

  void ensure_D(uint32_t n) {
    if (D.empty()) D = {0.0, 0.0};
    for (uint32_t m = uint32_t(D.size()); m <= n; ++m) {
      const auto& r = row(m - 1);  // C(m-1,k-1)/2^{m-1}
      double s = 0.0;
      for (uint32_t k = 2; k < m; ++k) s += r[k - 1] * D[k];
      D.push_back((1.0 + s) / (1.0 - std::ldexp(1.0, 1 - int(m))));
    }
  }

  void ensure_levels(uint32_t n, uint32_t d) {
    ensure_entropy(H, n, false);
    if (levels.empty()) {
      levels.emplace_back();  // level 0 mirrors H lazily below
      levels_n = 1;
    }
    uint32_t lo_n = levels_n;
    uint32_t hi_n = std::max(levels_n, n);
    // level 0: H_n with the n=1 convention H^0_1 = 0
    auto& l0 = levels[0];
    if (l0.size() < size_t(hi_n) + 1) {
      l0.resize(size_t(hi_n) + 1, 0.0);
      for (uint32_t m = 2; m <= hi_n; ++m) l0[m] = H[m];
    }
    for (uint32_t dd = 1; dd < levels.size(); ++dd) extend_level(dd, lo_n + 1, hi_n);
    while (levels.size() <= d) {
      levels.emplace_back();
      extend_level(uint32_t(levels.size()) - 1, 1, hi_n);
    }
    levels_n = hi_n;
  }

  void extend_level(uint32_t dd, uint32_t from, uint32_t to) {
    auto& lv = levels[dd];
    const auto& prev = levels[dd - 1];
    if (lv.empty()) {
      lv.resize(2, 0.0);
      lv[1] = double(dd);
      from = 2;
    }
    if (from < uint32_t(lv.size())) from = uint32_t(lv.size());
    if (lv.size() < size_t(to) + 1) lv.resize(size_t(to) + 1);
    for (uint32_t m = from; m <= to; ++m) {
      const auto& r = row(m);
      double s = 0.0;
      for (uint32_t k = 1; k <= m; ++k) s += r[k] * prev[k];
      lv[m] = h(m) + 2.0 * s;
    }
  }
};

Evaluator::Evaluator(EvalConfig cfg) : impl_(std::make_unique<Impl>()) { impl_->cfg = cfg; }
Evaluator::~Evaluator() = default;

const EvalConfig& Evaluator::config() const { return impl_->cfg; }

double Evaluator::split_entropy(uint32_t n) {
  impl_->check_n(n);
  std::lock_guard lock(impl_->mu);
  return impl_->h(n);
}

double Evaluator::tree_entropy(uint32_t n) {
  impl_->check_n(n);
  if (n <= 1) return 0.0;
  std::lock_guard lock(impl_->mu);
  impl_->ensure_entropy(impl_->H, n, false);
  return impl_->H[n];
}

double Evaluator::reduced_entropy(uint32_t n) {
  impl_->check_n(n);
  if (n <= 1) return 0.0;
  std::lock_guard lock(impl_->mu);
  impl_->ensure_entropy(impl_->Hp, n, true);
  return impl_->Hp[n];
}

double Evaluator::avg_depth(uint32_t n) {
  impl_->check_n(n);
  if (n <= 1) return 0.0;
  std::lock_guard lock(impl_->mu);
  impl_->ensure_D(n);
  return impl_->D[n];
}

double Evaluator::min_depth_entropy(uint32_t n, uint32_t d) {
  impl_->check_n(n);
  if (d > 1024) fail(Err::Capacity, "min_depth_entropy: exact levels capped at d <= 1024");
  if (n == 0) fail(Err::Domain, "min_depth_entropy: n >= 1 required");
  if (n == 1) return double(d);
  if (d == 0) return tree_entropy(n);
  std::lock_guard lock(impl_->mu);
  impl_->ensure_levels(n, d);
  return impl_->levels[d][n];
}

const std::vector<double>& Evaluator::binom_pmf(uint32_t n) {
  impl_->check_n(n);
  std::lock_guard lock(impl_->mu);
  return impl_->row(n);
}

}  // namespace hpt
