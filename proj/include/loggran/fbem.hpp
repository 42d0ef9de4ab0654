#pragma once

// Fuzzy-set-based evolving classifier. Each granule holds one trapezoid per
// attribute and a class label; the rule with the highest min-activation wins.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "loggran/granularity.hpp"
#include "loggran/normalizer.hpp"
#include "loggran/rule_base.hpp"
#include "loggran/trapezoid.hpp"
#include "loggran/types.hpp"

namespace loggran {

struct FbemGranule {
  GranuleSets sets{};
  int class_label = kNoEstimate;
  Step created_at = 0;
  Step last_win_at = 0;

  bool operator==(const FbemGranule&) const = default;
};

struct FbemConfig {
  double rho0 = 0.5;
  std::uint64_t h_r = 100;
  double eta = 3.0;
};

/// Conjunction of the attribute memberships (min t-norm).
inline double activation(const FbemGranule& g, const Vec& x) {
  double a = 1.0;
  for (std::size_t j = 0; j < kNumAttributes; ++j) a = std::min(a, membership(g.sets[j], x[j]));
  return a;
}

/// Six-case expansion of one set towards x. The cases partition the
/// expansion region: a shared endpoint belongs to the inner case and the
/// midpoint to the lower-core case. Exactly one parameter moves.
inline TrapezoidalSet fbem_update_set(const TrapezoidalSet& s, double x, double rho) {
  const double mp = s.midpoint();
  const Interval e = expansion_region(s, rho);

  TrapezoidalSet n = s;
  if (x < e.lo || x > e.hi) {
    // outside the expansion region: no case applies
  } else if (x < s.lower_support) {
    n.lower_support = x;
  } else if (x < s.lower_core || x <= mp) {
    n.lower_core = x;
  } else if (x <= s.upper_core || x <= s.upper_support) {
    n.upper_core = x;
  } else {
    n.upper_support = x;
  }
  return contract_to_rho(restore_order(n), rho);
}

inline FbemGranule update_granule(FbemGranule g, const Vec& x, double rho) {
  for (std::size_t j = 0; j < kNumAttributes; ++j) g.sets[j] = fbem_update_set(g.sets[j], x[j], rho);
  return g;
}

/// Mean absolute midpoint difference over the attributes.
inline double midpoint_distance(const GranuleSets& a, const GranuleSets& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < kNumAttributes; ++j) d += std::abs(a[j].midpoint() - b[j].midpoint());
  return d / static_cast<double>(kNumAttributes);
}

/// Merges the closest same-class pair when their midpoints are nearer than
/// rho/2. At most one merge per call. Returns true if a merge happened.
inline bool merge_similar(std::vector<FbemGranule>& granules, double rho) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < granules.size(); ++i) {
    for (std::size_t k = i + 1; k < granules.size(); ++k) {
      if (granules[i].class_label != granules[k].class_label) continue;
      const double d = midpoint_distance(granules[i].sets, granules[k].sets);
      if (d < best_d) {
        best_d = d;
        best = {i, k};
      }
    }
  }
  if (!best || !(best_d < rho / 2.0)) return false;

  auto [i, k] = *best;
  FbemGranule& a = granules[i];
  const FbemGranule& b = granules[k];
  for (std::size_t j = 0; j < kNumAttributes; ++j) a.sets[j] = contract_to_rho(hull(a.sets[j], b.sets[j]), rho);
  a.created_at = std::min(a.created_at, b.created_at);
  a.last_win_at = std::max(a.last_win_at, b.last_win_at);
  granules.erase(granules.begin() + static_cast<std::ptrdiff_t>(k));
  return true;
}

class FbemModel {
 public:
  explicit FbemModel(const FbemConfig& cfg = {})
      : granularity_(make_granularity(cfg.rho0, cfg.h_r, cfg.eta)) {}

  FbemModel(std::vector<FbemGranule> granules, GranularityState granularity, Normalizer normalizer)
      : granules_(std::move(granules)), granularity_(granularity), normalizer_(normalizer) {}

  const std::vector<FbemGranule>& granules() const { return granules_; }
  std::vector<FbemGranule>& mutable_granules() { return granules_; }
  const GranularityState& granularity() const { return granularity_; }
  const Normalizer& normalizer() const { return normalizer_; }
  std::size_t size() const { return granules_.size(); }
  bool empty() const { return granules_.empty(); }
  double rho() const { return granularity_.rho; }

  /// Winner-rule classification of an already normalized instance.
  Classification classify(const Vec& x) const {
    std::vector<double> act(granules_.size());
    for (std::size_t i = 0; i < granules_.size(); ++i) act[i] = activation(granules_[i], x);
    return select_winner(granules_, act, x);
  }

  /// Classifies a raw instance against the current bounds without learning.
  int predict(const Vec& raw) const {
    if (granules_.empty()) return kNoEstimate;
    return classify(normalizer_.apply(raw)).label;
  }

  std::size_t create_granule(const Vec& x, int c) {
    FbemGranule g;
    for (std::size_t j = 0; j < kNumAttributes; ++j) g.sets[j] = TrapezoidalSet::point(x[j]);
    g.class_label = c;
    g.created_at = granularity_.step;
    g.last_win_at = granularity_.step;
    granules_.push_back(g);
    ++granularity_.rules_created_this_period;
    return granules_.size() - 1;
  }

  /// One estimate-then-learn step. `label_of` receives the estimate and
  /// returns the weak label of the instance.
  template <class LabelFn>
    requires std::invocable<LabelFn&, int>
  StepResult learn_step(const Vec& raw, LabelFn&& label_of) {
    const Vec x = normalizer_.normalize(raw);
    ++granularity_.step;
    const Step h = granularity_.step;

    StepResult res;
    std::optional<Classification> cls;
    if (!granules_.empty()) {
      cls = classify(x);
      res.estimate = cls->label;
      granules_[cls->winner].last_win_at = h;
    }
    res.label = static_cast<int>(label_of(res.estimate));

    const double rho = granularity_.rho;
    const std::optional<std::size_t> target = most_active_enclosing(x, res.label, rho);
    if (!any_encloses(granules_, x, rho) || !has_class(granules_, res.label) || !target) {
      res.granule = create_granule(x, res.label);
      res.created = true;
    } else {
      granules_[*target] = update_granule(granules_[*target], x, rho);
      granules_[*target].last_win_at = h;
      res.granule = *target;
    }

    if (granularity_.at_period_boundary()) housekeeping();
    return res;
  }

  StepResult learn_step(const Vec& raw, int label) {
    return learn_step(raw, [label](int) { return label; });
  }

 private:
  // Most active granule of class c whose expansion region holds x.
  std::optional<std::size_t> most_active_enclosing(const Vec& x, int c, double rho) const {
    std::optional<std::size_t> best;
    double best_a = -1.0;
    for (std::size_t i = 0; i < granules_.size(); ++i) {
      if (granules_[i].class_label != c || !encloses(granules_[i].sets, x, rho)) continue;
      const double a = activation(granules_[i], x);
      if (a > best_a) {
        best_a = a;
        best = i;
      }
    }
    return best;
  }

  void housekeeping() {
    merge_similar(granules_, granularity_.rho);
    granularity_ = adapt_granularity(granularity_);
    contract_all(granules_, granularity_.rho);
    delete_inactive(granules_, granularity_.step, granularity_.h_r);
  }

  std::vector<FbemGranule> granules_;
  GranularityState granularity_;
  Normalizer normalizer_;
};

}  // namespace loggran
