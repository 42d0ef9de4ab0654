#pragma once

// Control-chart weak labeler. A window mean is tagged by how many standard
// deviations it sits from the grand mean of all window means:
//   d <= s -> 1, d <= 2s -> 2, d <= 3s -> 3, beyond -> 4.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace loggran {

enum class LabelMode { kOnline, kBatch };

/// Mean of one window of activity counts.
template <class T>
double window_mean(std::span<const T> u) {
  if (u.empty()) throw std::invalid_argument("window_mean: empty window");
  double s = 0.0;
  for (const T& v : u) s += static_cast<double>(v);
  return s / static_cast<double>(u.size());
}

/// Relative slack on the band edges. Values on an edge belong to the inner band.
inline constexpr double kBandEdgeTolerance = 1e-10;

inline int band_class(double mu, double grand_mean, double sigma) {
  if (!(sigma > 0.0)) return 1;
  const double d = std::abs(mu - grand_mean);
  const double edge = sigma * (1.0 + kBandEdgeTolerance);
  if (d <= edge) return 1;
  if (d <= 2.0 * edge) return 2;
  if (d <= 3.0 * edge) return 3;
  return 4;
}

class ControlChart {
 public:
  static constexpr std::uint64_t kDefaultWarmup = 30;

  explicit ControlChart(LabelMode mode = LabelMode::kOnline, std::uint64_t warmup = kDefaultWarmup)
      : mode_(mode), warmup_(warmup) {}

  /// Batch chart with statistics frozen from a full pass over `means`.
  static ControlChart fit(std::span<const double> means) {
    ControlChart c(LabelMode::kBatch, 0);
    for (double m : means) c.accumulate(m);
    return c;
  }

  LabelMode mode() const { return mode_; }
  std::uint64_t count() const { return count_; }
  double grand_mean() const { return mean_; }
  double sum_sq_dev() const { return m2_; }

  /// Population standard deviation of the means accumulated so far.
  double sigma() const {
    if (count_ == 0) throw std::logic_error("sigma: no observations");
    return std::sqrt(m2_ / static_cast<double>(count_));
  }

  int tag(double mu) const {
    if (count_ == 0 || (mode_ == LabelMode::kOnline && count_ < warmup_)) return 1;
    return band_class(mu, mean_, sigma());
  }

  /// Online mode folds mu into the statistics; batch statistics stay frozen.
  void observe(double mu) {
    if (mode_ == LabelMode::kOnline) accumulate(mu);
  }

  /// Label-then-learn: the tag never depends on its own instance.
  int tag_and_observe(double mu) {
    const int c = tag(mu);
    observe(mu);
    return c;
  }

  std::vector<int> tag_all(std::span<const double> means) {
    std::vector<int> out;
    out.reserve(means.size());
    for (double m : means) out.push_back(tag_and_observe(m));
    return out;
  }

 private:
  // Welford update.
  void accumulate(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  LabelMode mode_;
  std::uint64_t warmup_;
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Batch labels for a whole dataset of instance means.
inline std::vector<int> label_batch(std::span<const double> means) {
  ControlChart chart = ControlChart::fit(means);
  return chart.tag_all(means);
}

inline std::vector<int> label_online(std::span<const double> means,
                                     std::uint64_t warmup = ControlChart::kDefaultWarmup) {
  ControlChart chart(LabelMode::kOnline, warmup);
  return chart.tag_all(means);
}

}  // namespace loggran
