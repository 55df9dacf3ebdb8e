#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hpt {

enum class Err {
  Domain = 1,
  Capacity,
  Duplicate,
  Empty,
  Format,
  Truncated,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const noexcept { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw Error(c, msg); }

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 output mixer; mix64(0) == 0
constexpr uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

struct SplitMix {
  uint64_t state;
  explicit SplitMix(uint64_t seed) : state(seed) {}
  uint64_t next() {
    state += kGolden;
    return mix64(state);
  }
};

// decorrelated per-trial seed for reproducible ensembles
inline uint64_t trial_seed(uint64_t seed, uint64_t trial) {
  return mix64(seed + kGolden * (trial + 1));
}

// runs fn(0..trials-1) on a small worker pool; fn must only touch its own slot
template <class F>
void for_each_trial(uint32_t trials, F&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (trials < 16 || hw < 2) {
    for (uint32_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<uint32_t> next{0};
  auto worker = [&] {
    for (uint32_t t; (t = next.fetch_add(1)) < trials;) fn(t);
  };
  std::vector<std::thread> pool(std::min(hw, 8u) - 1);
  for (auto& th : pool) th = std::thread(worker);
  worker();
  for (auto& th : pool) th.join();
}

// running mean / standard error accumulator
struct Moments {
  double sum = 0.0, sumsq = 0.0;
  uint64_t n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / double(n) : 0.0; }
  double se() const {
    if (n < 2) return 0.0;
    double m = mean();
    double var = (sumsq - double(n) * m * m) / double(n - 1);
    return var > 0.0 ? std::sqrt(var / double(n)) : 0.0;
  }
};

}  // namespace hpt
