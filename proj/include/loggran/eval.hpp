#pragma once

// Prequential evaluation: recursive accuracy and mean rule count, confusion
// matrix, and multi-run summaries with Student-t confidence intervals.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "loggran/types.hpp"

namespace loggran {

using ConfusionMatrix = std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>;

struct EvalState {
  std::uint64_t step = 0;
  double accuracy = 0.0;
  double avg_rules = 0.0;
  ConfusionMatrix confusion{};  // [actual - 1][estimated - 1]
  std::uint64_t cold_starts = 0;  // steps without an estimate, scored wrong
  double elapsed_s = 0.0;

  void record(int actual, int estimated, std::size_t rule_count) {
    ++step;
    const double h = static_cast<double>(step);
    const double tau = (estimated != kNoEstimate && estimated == actual) ? 1.0 : 0.0;
    accuracy = (h - 1.0) / h * accuracy + tau / h;
    avg_rules = (h - 1.0) / h * avg_rules + static_cast<double>(rule_count) / h;
    if (estimated == kNoEstimate) {
      ++cold_starts;
    } else if (is_valid_class(actual) && is_valid_class(estimated)) {
      ++confusion[static_cast<std::size_t>(actual - 1)][static_cast<std::size_t>(estimated - 1)];
    }
  }

  std::uint64_t confusion_total() const {
    std::uint64_t s = 0;
    for (const auto& row : confusion)
      for (auto v : row) s += v;
    return s;
  }

  std::uint64_t confusion_trace() const {
    std::uint64_t s = 0;
    for (int k = 0; k < kNumClasses; ++k) s += confusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    return s;
  }
};

/// Times a callable on a steady clock and adds the duration to `state`.
template <class F>
decltype(auto) timed(EvalState& state, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  struct Stop {
    EvalState& s;
    std::chrono::steady_clock::time_point t0;
    ~Stop() { s.elapsed_s += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
  } stop{state, t0};
  return std::forward<F>(f)();
}

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Two-sided Student-t interval over the sample.
inline MeanCi mean_ci(std::span<const double> xs, double confidence) {
  if (xs.size() < 2) throw std::invalid_argument("mean_ci: need at least two runs");
  if (!(confidence >= 0.0 && confidence < 1.0)) throw std::invalid_argument("mean_ci: confidence must lie in [0, 1)");
  const double n = static_cast<double>(xs.size());
  double m = 0.0;
  for (double x : xs) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (confidence == 0.0 || sd == 0.0) return {m, 0.0};
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  return {m, t * sd / std::sqrt(n)};
}

struct EvalSummary {
  std::size_t runs = 0;
  double confidence = 0.0;
  MeanCi accuracy;
  MeanCi rules;
  MeanCi time_s;
};

inline EvalSummary aggregate(std::span<const EvalState> runs, double confidence) {
  if (runs.size() < 2) throw std::invalid_argument("aggregate: need at least two runs");
  std::vector<double> acc, rules, time;
  for (const auto& r : runs) {
    acc.push_back(r.accuracy);
    rules.push_back(r.avg_rules);
    time.push_back(r.elapsed_s);
  }
  return {runs.size(), confidence, mean_ci(acc, confidence), mean_ci(rules, confidence), mean_ci(time, confidence)};
}

}  // namespace loggran
