#pragma once

// Pieces shared by the rule-based and the neural granular classifiers. Both
// granule types expose `sets`, `class_label` and `last_win_at`.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <vector>

#include "loggran/trapezoid.hpp"
#include "loggran/types.hpp"

namespace loggran {

using GranuleSets = std::array<TrapezoidalSet, kNumAttributes>;

struct Classification {
  int label = kNoEstimate;
  std::size_t winner = 0;
  double activation = 0.0;
};

/// Result of one prequential learning step.
struct StepResult {
  int estimate = kNoEstimate;  // kNoEstimate on cold start
  int label = kNoEstimate;     // weak label revealed after the estimate
  bool created = false;        // a granule was appended
  std::size_t granule = 0;     // index of the created or updated granule
};

inline Vec midpoints(const GranuleSets& sets) {
  Vec mp{};
  for (std::size_t j = 0; j < kNumAttributes; ++j) mp[j] = sets[j].midpoint();
  return mp;
}

/// True when every attribute of x lies in the matching expansion region.
inline bool encloses(const GranuleSets& sets, const Vec& x, double rho) {
  for (std::size_t j = 0; j < kNumAttributes; ++j) {
    if (!expansion_region(sets[j], rho).contains(x[j])) return false;
  }
  return true;
}

template <class Granule>
bool any_encloses(const std::vector<Granule>& granules, const Vec& x, double rho) {
  for (const auto& g : granules) {
    if (encloses(g.sets, x, rho)) return true;
  }
  return false;
}

template <class Granule>
bool has_class(const std::vector<Granule>& granules, int c) {
  for (const auto& g : granules) {
    if (g.class_label == c) return true;
  }
  return false;
}

/// Index of the granule whose midpoint vector is closest to x (Euclidean),
/// lowest index on ties.
template <class Granule>
std::size_t nearest_midpoint(const std::vector<Granule>& granules, const Vec& x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < granules.size(); ++i) {
    const Vec mp = midpoints(granules[i].sets);
    double d = 0.0;
    for (std::size_t j = 0; j < kNumAttributes; ++j) d += (x[j] - mp[j]) * (x[j] - mp[j]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

/// Max-selection over activations; ties go to the oldest granule. When every
/// activation is zero the nearest midpoint decides.
template <class Granule>
Classification select_winner(const std::vector<Granule>& granules, const std::vector<double>& act,
                             const Vec& x) {
  if (granules.empty()) throw EmptyModelError();
  std::size_t best = 0;
  for (std::size_t i = 1; i < act.size(); ++i) {
    if (act[i] > act[best]) best = i;
  }
  if (!(act[best] > 0.0)) best = nearest_midpoint(granules, x);
  return {granules[best].class_label, best, act[best]};
}

template <class Granule>
void contract_all(std::vector<Granule>& granules, double rho) {
  for (auto& g : granules) {
    for (auto& s : g.sets) s = contract_to_rho(s, rho);
  }
}

/// Drops granules that have not won since `step - horizon`, keeping the last
/// granule of every class. Returns the number removed.
template <class Granule>
std::size_t delete_inactive(std::vector<Granule>& granules, Step step, Step horizon) {
  if (step < horizon) return 0;
  const Step cutoff = step - horizon;
  std::map<int, std::size_t> per_class;
  for (const auto& g : granules) ++per_class[g.class_label];
  std::vector<Granule> kept;
  kept.reserve(granules.size());
  std::size_t removed = 0;
  for (auto& g : granules) {
    if (g.last_win_at < cutoff && per_class[g.class_label] > 1) {
      --per_class[g.class_label];
      ++removed;
      continue;
    }
    kept.push_back(std::move(g));
  }
  granules = std::move(kept);
  return removed;
}

}  // namespace loggran
