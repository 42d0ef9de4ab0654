#pragma once

#include <limits>

#include "loggran/types.hpp"

namespace loggran {

/// Online min-max scaling with bounds that only ever expand.
class Normalizer {
 public:
  /// Widens the bounds with `raw`, then maps it into [0, 1].
  /// Attributes whose bounds coincide map to 0.5.
  Vec normalize(const Vec& raw) {
    Vec out{};
    for (std::size_t j = 0; j < kNumAttributes; ++j) {
      if (raw[j] < min_[j]) min_[j] = raw[j];
      if (raw[j] > max_[j]) max_[j] = raw[j];
      out[j] = scale(j, raw[j]);
    }
    ++seen_;
    return out;
  }

  /// Maps without touching the bounds; values outside are clamped.
  Vec apply(const Vec& raw) const {
    Vec out{};
    for (std::size_t j = 0; j < kNumAttributes; ++j) {
      double v = scale(j, raw[j]);
      out[j] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
    return out;
  }

  std::uint64_t seen() const { return seen_; }
  const Vec& min() const { return min_; }
  const Vec& max() const { return max_; }

  void restore(const Vec& lo, const Vec& hi, std::uint64_t seen) {
    min_ = lo;
    max_ = hi;
    seen_ = seen;
  }

 private:
  double scale(std::size_t j, double v) const {
    const double span = max_[j] - min_[j];
    if (!(span > 0.0)) return 0.5;
    return (v - min_[j]) / span;
  }

  static Vec filled(double v) {
    Vec a{};
    a.fill(v);
    return a;
  }

  Vec min_ = filled(std::numeric_limits<double>::infinity());
  Vec max_ = filled(-std::numeric_limits<double>::infinity());
  std::uint64_t seen_ = 0;
};

}  // namespace loggran
