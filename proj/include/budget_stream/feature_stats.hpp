#pragma once

#include <cstddef>
#include <optional>

namespace budget_stream {

/// Single-pass moments (Welford) plus range of one feature's observed values.
struct FeatureStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from the mean
  double min = 0.0;
  double max = 0.0;

  /// Throws ParameterError on a non-finite value.
  void observe(double value);

  /// Sample variance of the values after min-max rescaling to [0, 1]:
  /// (m2 / (count - 1)) / (max - min)^2. Zero for a constant feature,
  /// nullopt below two observations.
  std::optional<double> rescaled_variance() const;
};

}  // namespace budget_stream
