#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "budget_stream/cost.hpp"
#include "budget_stream/dataset.hpp"
#include "budget_stream/instance.hpp"
#include "budget_stream/policies.hpp"

namespace budget_stream {

using PotentialSet = std::vector<FeatureId>;

struct TraceRecord {
  std::size_t instance_index = 0;
  Cost budget;
  std::vector<std::pair<FeatureId, Cost>> acquisitions;
  Cost leftover;
};

using AcquisitionTrace = std::vector<TraceRecord>;

/// Snapshot handed to an observer after every engine step (each acquisition
/// and each finalized instance).
struct EngineStep {
  std::size_t instance_index;
  const Instance& instance;
  const PotentialSet& potential;
  Cost allocated_so_far;  // sum of fresh allocations, never above the total budget
  Cost total_budget;
};

struct EngineOptions {
  /// Carry an instance's unspent budget over to the next instance instead of
  /// forfeiting it. Off by default.
  bool rollover_leftover = false;
  std::function<void(const EngineStep&)> observer;
};

struct StreamResult {
  TrainingSet training;
  AcquisitionTrace trace;
  Cost total_budget;
  Cost total_allocated;
  Cost total_spent;
};

/// Members of pf still affordable: cost + spent <= budget.
PotentialSet prune_pf(std::span<const FeatureId> pf, Cost spent, Cost budget, const CostVector& costs);

/// Copies the value of `feature` from the dataset row and charges its cost.
/// Throws ContractError if already acquired or over budget.
void acquire(Instance& instance, FeatureId feature, const Dataset& dataset, const CostVector& costs);

/// Runs the stream in arrival order: allocate b(x), acquire features while
/// any remain affordable, reveal the label, append to the training set and
/// update the policy. Budget invariants are checked after every step and a
/// violation throws ContractError.
StreamResult run_stream(const Dataset& dataset, const StreamSplit& split, AcquisitionPolicy& policy,
                        Cost total_budget, const EngineOptions& options = {});

/// CSV `instance_index,budget,feature,cost,cumulative_spent,leftover`, one line
/// per acquisition (instances with none get one line with empty feature/cost).
void write_trace_csv(const AcquisitionTrace& trace, const std::vector<FeatureSpec>& features, std::ostream& out);

/// Acquired training set with empty cells for missing values; last column is
/// the label.
void write_training_csv(const TrainingSet& training, const Dataset& dataset, std::ostream& out);

}  // namespace budget_stream
