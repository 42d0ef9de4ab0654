#pragma once

#include <algorithm>
#include <array>

namespace loggran {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
};

/// Trapezoidal fuzzy set on a normalized attribute domain.
///
/// The four abscissae are the support endpoints and the core endpoints:
/// lower_support <= lower_core <= upper_core <= upper_support.
struct TrapezoidalSet {
  double lower_support = 0.0;
  double lower_core = 0.0;
  double upper_core = 0.0;
  double upper_support = 0.0;

  static TrapezoidalSet point(double x) { return {x, x, x, x}; }

  double width() const { return upper_support - lower_support; }
  double midpoint() const { return (lower_core + upper_core) / 2.0; }
  Interval support() const { return {lower_support, upper_support}; }
  Interval core() const { return {lower_core, upper_core}; }
  bool is_ordered() const {
    return lower_support <= lower_core && lower_core <= upper_core && upper_core <= upper_support;
  }
  bool is_degenerate() const { return lower_support == upper_support; }

  std::array<double, 4> params() const { return {lower_support, lower_core, upper_core, upper_support}; }

  bool operator==(const TrapezoidalSet&) const = default;
};

/// Piecewise-linear trapezoid membership. A zero-width shoulder is a crisp edge.
inline double membership(const TrapezoidalSet& s, double x) {
  if (x < s.lower_support || x > s.upper_support) return 0.0;
  if (x >= s.lower_core && x <= s.upper_core) return 1.0;
  if (x < s.lower_core) return (x - s.lower_support) / (s.lower_core - s.lower_support);
  return (s.upper_support - x) / (s.upper_support - s.upper_core);
}

inline double midpoint(const TrapezoidalSet& s) { return s.midpoint(); }

/// Region of half-width rho/2 around the midpoint inside which the set may grow.
inline Interval expansion_region(const TrapezoidalSet& s, double rho) {
  const double mp = s.midpoint();
  return {mp - rho / 2.0, mp + rho / 2.0};
}

/// Sorts the four parameters back into ordering when an update left them crossed.
inline TrapezoidalSet restore_order(TrapezoidalSet s) {
  std::array<double, 4> p = s.params();
  std::sort(p.begin(), p.end());
  return {p[0], p[1], p[2], p[3]};
}

/// Shrinks the support to the expansion region of the current midpoint and
/// clips the core into the new support. Sets already inside are unchanged.
inline TrapezoidalSet contract_to_rho(TrapezoidalSet s, double rho) {
  const Interval e = expansion_region(s, rho);
  if (e.lo > s.lower_support) s.lower_support = e.lo;
  if (e.hi < s.upper_support) s.upper_support = e.hi;
  s.lower_core = std::clamp(s.lower_core, s.lower_support, s.upper_support);
  s.upper_core = std::clamp(s.upper_core, s.lower_support, s.upper_support);
  return s;
}

/// Parameter-wise convex hull of two sets.
inline TrapezoidalSet hull(const TrapezoidalSet& a, const TrapezoidalSet& b) {
  return {std::min(a.lower_support, b.lower_support), std::min(a.lower_core, b.lower_core),
          std::max(a.upper_core, b.upper_core), std::max(a.upper_support, b.upper_support)};
}

}  // namespace loggran
