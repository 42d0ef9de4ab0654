#pragma once

#include <algorithm>
#include <cstdint>

#include "loggran/types.hpp"

namespace loggran {

inline constexpr double kRhoMin = 0.01;
inline constexpr double kRhoMax = 1.0;

struct GranularityState {
  double rho = 0.5;
  double eta = 3.0;              // reference growth rate, rules per period
  std::uint64_t h_r = 100;       // adaptation period in steps
  std::uint64_t rules_created_this_period = 0;
  Step step = 0;

  bool at_period_boundary() const { return step > 0 && h_r > 0 && step % h_r == 0; }
};

inline GranularityState make_granularity(double rho0, std::uint64_t h_r, double eta) {
  if (!(rho0 > 0.0 && rho0 <= 1.0)) throw ConfigError("rho0 must lie in (0, 1]");
  if (h_r == 0) throw ConfigError("h_r must be positive");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  GranularityState g;
  g.rho = std::clamp(rho0, kRhoMin, kRhoMax);
  g.eta = eta;
  g.h_r = h_r;
  return g;
}

/// Grows rho when more than eta rules were created during the last period,
/// shrinks it otherwise. Resets the period rule counter.
inline GranularityState adapt_granularity(GranularityState s) {
  const double r = static_cast<double>(s.rules_created_this_period);
  const double hr = static_cast<double>(s.h_r);
  const double factor = r > s.eta ? 1.0 + r / hr : 1.0 - (s.eta - r) / hr;
  s.rho = std::clamp(factor * s.rho, kRhoMin, kRhoMax);
  s.rules_created_this_period = 0;
  return s;
}

}  // namespace loggran
