#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace loggran {

/// Number of attributes in every feature vector (mean, sigma, min, max, max jump).
inline constexpr std::size_t kNumAttributes = 5;

/// Severity classes produced by the control chart: 1 = normal .. 4 = high severity.
inline constexpr int kNumClasses = 4;

/// Estimate reported when a model has no granule yet.
inline constexpr int kNoEstimate = 0;

using Vec = std::array<double, kNumAttributes>;

using Step = std::uint64_t;

class EmptyModelError : public std::logic_error {
 public:
  EmptyModelError() : std::logic_error("classify called on a model without granules") {}
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool is_valid_class(int c) { return c >= 1 && c <= kNumClasses; }

}  // namespace loggran
