#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "loggran/loggran.hpp"

namespace loggran::testing {

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  Vec vec(double lo = 0.0, double hi = 1.0) {
    Vec v{};
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  /// Random ordered trapezoid inside [0, 1] with width at most `max_width`.
  TrapezoidalSet trapezoid(double max_width = 1.0) {
    const double w = uniform(0.0, max_width);
    const double l = uniform(0.0, 1.0 - w);
    double a = uniform(l, l + w), b = uniform(l, l + w);
    if (a > b) std::swap(a, b);
    return {l, a, b, l + w};
  }

  std::vector<double> doubles(std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (auto& x : out) x = uniform(lo, hi);
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline bool sets_ordered(const GranuleSets& sets) {
  for (const auto& s : sets) {
    if (!s.is_ordered()) return false;
  }
  return true;
}

inline double max_width(const GranuleSets& sets) {
  double w = 0.0;
  for (const auto& s : sets) w = std::max(w, s.width());
  return w;
}

}  // namespace loggran::testing
