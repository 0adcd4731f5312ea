#include "budget_stream/feature_stats.hpp"

#include <cmath>

#include "budget_stream/error.hpp"

namespace budget_stream {

void FeatureStats::observe(double value) {
  if (!std::isfinite(value)) throw ParameterError("FeatureStats::observe: non-finite value");
  ++count;
  if (count == 1) {
    mean = value;
    m2 = 0.0;
    min = max = value;
    return;
  }
  const double delta = value - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (value - mean);
  if (m2 < 0.0) m2 = 0.0;
  if (value < min) min = value;
  if (value > max) max = value;
}

std::optional<double> FeatureStats::rescaled_variance() const {
  if (count < 2) return std::nullopt;
  const double range = max - min;
  if (!(range > 0.0)) return 0.0;
  return (m2 / static_cast<double>(count - 1)) / (range * range);
}

}  // namespace budget_stream
