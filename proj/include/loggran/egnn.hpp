#pragma once

// Evolving granular neural network. Inputs are matched against trapezoidal
// granules by a similarity degree, weighted by product synapses, combined by
// an aggregation neuron per granule, and the output neuron takes the max.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <vector>

#include "loggran/granularity.hpp"
#include "loggran/normalizer.hpp"
#include "loggran/rule_base.hpp"
#include "loggran/trapezoid.hpp"
#include "loggran/types.hpp"

namespace loggran {

enum class AggregationKind {
  kMin,      // o = min_j(sim_j * w_j)
  kProduct,  // o = prod_j(sim_j * w_j)
};

struct EgnnGranule {
  GranuleSets sets{};
  int class_label = kNoEstimate;
  Vec weights{1.0, 1.0, 1.0, 1.0, 1.0};
  std::uint64_t right_count = 0;
  std::uint64_t wrong_count = 0;
  Step created_at = 0;
  Step last_win_at = 0;

  bool operator==(const EgnnGranule&) const = default;
};

struct EgnnConfig {
  double rho0 = 0.5;
  std::uint64_t h_r = 100;
  double eta = 3.0;
  AggregationKind aggregation = AggregationKind::kMin;
  // Apply the weight penalty to the winner on misclassified steps as well.
  // With false, weights are only touched on correctly classified steps, where
  // the error term is zero.
  bool penalize_on_error = true;
};

/// Similarity of a number to a trapezoid, 1 only when the set is the point x.
inline double similarity(const TrapezoidalSet& s, double x) {
  const double denom = 4.0 * (std::max(s.upper_support, x) - std::min(s.lower_support, x));
  if (!(denom > 0.0)) return 1.0;
  const double num = std::abs(s.lower_support - x) + std::abs(s.lower_core - x) +
                     std::abs(s.upper_core - x) + std::abs(s.upper_support - x);
  return std::clamp(1.0 - num / denom, 0.0, 1.0);
}

inline Vec similarities(const GranuleSets& sets, const Vec& x) {
  Vec out{};
  for (std::size_t j = 0; j < kNumAttributes; ++j) out[j] = similarity(sets[j], x[j]);
  return out;
}

inline double neuron_activate(const EgnnGranule& g, const Vec& x, AggregationKind kind = AggregationKind::kMin) {
  const Vec sim = similarities(g.sets, x);
  double o = 1.0;
  for (std::size_t j = 0; j < kNumAttributes; ++j) {
    const double v = sim[j] * g.weights[j];
    o = kind == AggregationKind::kMin ? std::min(o, v) : o * v;
  }
  return o;
}

/// Geometry adaptation of one set: the six cases are tested against the
/// parameters before the update, the midpoint is recomputed from the new
/// core, and the support is pulled back inside the new expansion region.
inline TrapezoidalSet egnn_adapt_set(const TrapezoidalSet& s, double x, double rho) {
  const double mp = s.midpoint();
  const Interval e = expansion_region(s, rho);
  auto within = [x](double a, double b) { return a <= x && x <= b; };

  TrapezoidalSet n = s;
  if (within(e.lo, s.lower_support)) n.lower_support = x;
  if (within(e.lo, mp)) {
    n.lower_core = x;
    n.upper_core = mp;
  } else if (within(mp, e.hi)) {
    n.lower_core = mp;
    n.upper_core = x;
  }
  if (within(s.upper_support, e.hi)) n.upper_support = x;
  return contract_to_rho(restore_order(n), rho);
}

inline EgnnGranule adapt_granule(EgnnGranule g, const Vec& x, double rho) {
  for (std::size_t j = 0; j < kNumAttributes; ++j) g.sets[j] = egnn_adapt_set(g.sets[j], x[j], rho);
  return g;
}

/// Error magnitude scaled onto [0, 1] by the largest possible class distance.
inline double normalized_error(int error) {
  return static_cast<double>(std::abs(error)) / static_cast<double>(kNumClasses - 1);
}

/// Counts the outcome for the winner, then lowers its weights by
/// beta * similarity * |error|, beta being the winner's error ratio.
inline EgnnGranule update_weights(EgnnGranule g, const Vec& sim, int error) {
  if (error == 0) {
    ++g.right_count;
  } else {
    ++g.wrong_count;
  }
  const double beta = static_cast<double>(g.wrong_count) / static_cast<double>(g.right_count + g.wrong_count);
  const double e = normalized_error(error);
  for (std::size_t j = 0; j < kNumAttributes; ++j) {
    g.weights[j] = std::clamp(g.weights[j] - beta * sim[j] * e, 0.0, 1.0);
  }
  return g;
}

class EgnnModel {
 public:
  explicit EgnnModel(const EgnnConfig& cfg = {})
      : granularity_(make_granularity(cfg.rho0, cfg.h_r, cfg.eta)),
        aggregation_(cfg.aggregation),
        penalize_on_error_(cfg.penalize_on_error) {}

  EgnnModel(std::vector<EgnnGranule> granules, GranularityState granularity, Normalizer normalizer,
            AggregationKind aggregation = AggregationKind::kMin, bool penalize_on_error = true)
      : granules_(std::move(granules)),
        granularity_(granularity),
        normalizer_(normalizer),
        aggregation_(aggregation),
        penalize_on_error_(penalize_on_error) {}

  const std::vector<EgnnGranule>& granules() const { return granules_; }
  std::vector<EgnnGranule>& mutable_granules() { return granules_; }
  const GranularityState& granularity() const { return granularity_; }
  const Normalizer& normalizer() const { return normalizer_; }
  AggregationKind aggregation() const { return aggregation_; }
  bool penalize_on_error() const { return penalize_on_error_; }
  std::size_t size() const { return granules_.size(); }
  bool empty() const { return granules_.empty(); }
  double rho() const { return granularity_.rho; }

  std::vector<double> activations(const Vec& x) const {
    std::vector<double> o(granules_.size());
    for (std::size_t i = 0; i < granules_.size(); ++i) o[i] = neuron_activate(granules_[i], x, aggregation_);
    return o;
  }

  Classification classify(const Vec& x) const { return select_winner(granules_, activations(x), x); }

  int predict(const Vec& raw) const {
    if (granules_.empty()) return kNoEstimate;
    return classify(normalizer_.apply(raw)).label;
  }

  std::size_t create_granule(const Vec& x, int c) {
    EgnnGranule g;
    for (std::size_t j = 0; j < kNumAttributes; ++j) g.sets[j] = TrapezoidalSet::point(x[j]);
    g.class_label = c;
    g.created_at = granularity_.step;
    g.last_win_at = granularity_.step;
    granules_.push_back(g);
    ++granularity_.rules_created_this_period;
    return granules_.size() - 1;
  }

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
    }
    res.label = static_cast<int>(label_of(res.estimate));

    if (!cls) {
      res.granule = create_granule(x, res.label);
      res.created = true;
      if (granularity_.at_period_boundary()) housekeeping();
      return res;
    }

    const int error = res.label - res.estimate;
    EgnnGranule& winner = granules_[cls->winner];
    winner.last_win_at = h;
    if (error == 0 || penalize_on_error_) {
      winner = update_weights(winner, similarities(winner.sets, x), error);
    } else {
      ++winner.wrong_count;
    }

    const double rho = granularity_.rho;
    if (!any_encloses(granules_, x, rho) || error != 0) {
      res.granule = create_granule(x, res.label);
      res.created = true;
    } else {
      granules_[cls->winner] = adapt_granule(granules_[cls->winner], x, rho);
      res.granule = cls->winner;
    }

    if (granularity_.at_period_boundary()) housekeeping();
    return res;
  }

  StepResult learn_step(const Vec& raw, int label) {
    return learn_step(raw, [label](int) { return label; });
  }

 private:
  void housekeeping() {
    granularity_ = adapt_granularity(granularity_);
    contract_all(granules_, granularity_.rho);
    delete_inactive(granules_, granularity_.step, granularity_.h_r);
  }

  std::vector<EgnnGranule> granules_;
  GranularityState granularity_;
  Normalizer normalizer_;
  AggregationKind aggregation_ = AggregationKind::kMin;
  bool penalize_on_error_ = true;
};

}  // namespace loggran
