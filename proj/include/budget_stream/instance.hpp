#pragma once

#include <optional>
#include <span>
#include <vector>

#include "budget_stream/cost.hpp"
#include "budget_stream/dataset.hpp"

namespace budget_stream {

using PartialValues = std::vector<std::optional<double>>;

/// One stream instance as seen by the learner: only acquired values are
/// present. spent is the exact sum of acquired feature costs.
struct Instance {
  std::size_t row = 0;
  PartialValues values;
  std::vector<FeatureId> acquisition_order;
  Cost spent;
  Cost budget;
  std::optional<ClassId> label;

  bool has(FeatureId f) const { return values[f].has_value(); }
  bool complete() const { return acquisition_order.size() == values.size(); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

using TrainingSet = std::vector<Instance>;

/// Fully-acquired labeled instances for the given rows (budget = spent).
TrainingSet complete_instances(const Dataset& dataset, std::span<const std::size_t> rows);

}  // namespace budget_stream
