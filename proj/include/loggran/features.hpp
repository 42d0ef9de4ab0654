#pragma once

// Two-level windowing: per-sub-window activity means, then a five-metric
// feature vector per clock-aligned instance window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "loggran/types.hpp"

namespace loggran {

struct FeatureVector {
  double mean = 0.0;      // x1
  double sigma = 0.0;     // x2, population
  double min = 0.0;       // x3
  double max = 0.0;       // x4
  double max_jump = 0.0;  // x5, largest |mu[j+1] - mu[j]|

  Vec to_vec() const { return {mean, sigma, min, max, max_jump}; }
  static FeatureVector from_vec(const Vec& v) { return {v[0], v[1], v[2], v[3], v[4]}; }
};

inline FeatureVector extract(std::span<const double> sub_means) {
  if (sub_means.empty()) throw std::invalid_argument("extract: no sub-window means");
  const double n = static_cast<double>(sub_means.size());
  FeatureVector f;
  double sum = 0.0;
  f.min = sub_means.front();
  f.max = sub_means.front();
  for (std::size_t i = 0; i < sub_means.size(); ++i) {
    const double v = sub_means[i];
    sum += v;
    f.min = std::min(f.min, v);
    f.max = std::max(f.max, v);
    if (i > 0) f.max_jump = std::max(f.max_jump, std::abs(v - sub_means[i - 1]));
  }
  f.mean = sum / n;
  double ss = 0.0;
  for (double v : sub_means) ss += (v - f.mean) * (v - f.mean);
  f.sigma = std::sqrt(ss / n);
  // Summation order can push the mean one ulp past an extreme.
  f.mean = std::clamp(f.mean, f.min, f.max);
  return f;
}

struct ActivityWindow {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;  // exclusive
  double mean = 0.0;
};

struct Instance {
  std::int64_t start_ms = 0;
  FeatureVector features;
};

class OutOfOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Groups sub-windows into landmark instance windows aligned to multiples of
/// `instance_len_ms` since the epoch. Incomplete windows are never emitted.
class WindowAggregator {
 public:
  WindowAggregator(std::int64_t instance_len_ms, std::int64_t sub_len_ms)
      : instance_len_(instance_len_ms), sub_len_(sub_len_ms) {
    if (instance_len_ms <= 0 || sub_len_ms <= 0 || instance_len_ms % sub_len_ms != 0) {
      throw ConfigError("instance window must be a positive multiple of the sub-window");
    }
  }

  std::size_t windows_per_instance() const { return static_cast<std::size_t>(instance_len_ / sub_len_); }

  /// Feeds one sub-window; returns an instance when its window completes.
  std::optional<Instance> push(const ActivityWindow& w) {
    if (w.end_ms - w.start_ms != sub_len_) throw std::invalid_argument("sub-window has the wrong length");
    if (last_end_ && w.start_ms < *last_end_) throw OutOfOrderError("sub-window out of order");
    last_end_ = w.end_ms;

    const std::int64_t key = floor_div(w.start_ms, instance_len_);
    if (!current_key_ || *current_key_ != key) {
      current_key_ = key;
      means_.clear();
    }
    // A gap inside the instance window leaves it incomplete.
    const std::int64_t expected_start = key * instance_len_ + static_cast<std::int64_t>(means_.size()) * sub_len_;
    if (w.start_ms != expected_start) {
      means_.clear();
      current_key_ = std::nullopt;
      return std::nullopt;
    }
    means_.push_back(w.mean);
    if (means_.size() < windows_per_instance()) return std::nullopt;

    Instance inst{key * instance_len_, extract(means_)};
    means_.clear();
    current_key_ = std::nullopt;
    return inst;
  }

 private:
  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }

  std::int64_t instance_len_;
  std::int64_t sub_len_;
  std::optional<std::int64_t> current_key_;
  std::optional<std::int64_t> last_end_;
  std::vector<double> means_;
};

inline std::vector<Instance> windows_to_instances(std::span<const ActivityWindow> windows, std::int64_t instance_len_ms,
                                                  std::int64_t sub_len_ms) {
  WindowAggregator agg(instance_len_ms, sub_len_ms);
  std::vector<Instance> out;
  for (const auto& w : windows) {
    if (auto inst = agg.push(w)) out.push_back(*inst);
  }
  return out;
}

}  // namespace loggran
