#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "budget_stream/cost.hpp"
#include "budget_stream/cost_tree.hpp"
#include "budget_stream/dataset.hpp"
#include "budget_stream/policies.hpp"

namespace budget_stream {

inline constexpr std::string_view kCompletePolicyName = "complete";

struct SweepConfig {
  std::vector<PolicyKind> policies{PolicyKind::PureRandom, PolicyKind::CostRandom, PolicyKind::VarianceCost,
                                   PolicyKind::TreeBased, PolicyKind::Oracle};
  std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int runs = 10;
  std::uint64_t base_seed = 0;
  PolicyParams policy_params;
  /// Evaluation classifier trained on the acquired set.
  TreeParams eval_tree;
  bool include_complete = true;
  /// Upper bound on OpenMP threads; 0 leaves the runtime default.
  int threads = 0;

  void validate() const;
};

struct SweepRow {
  std::string policy;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double auc = 0.0;
  Cost total_spent;
  std::size_t full_instances = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepAggregate {
  std::string policy;
  double alpha = 0.0;
  double mean_auc = 0.0;
  double std_auc = 0.0;

  friend bool operator==(const SweepAggregate&, const SweepAggregate&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// Seed shared by every cell of run r: the stream/test split depends on it, so
/// policies and budgets are compared on identical splits.
std::uint64_t run_seed(std::uint64_t base_seed, int run);

/// Policy generator seed for one grid cell; distinct for distinct
/// (policy, alpha, run) triples.
std::uint64_t policy_seed(std::uint64_t seed, std::string_view policy, double alpha);

/// B = alpha * |stream| * sum(costs), exact.
Cost sweep_budget(const Dataset& dataset, std::size_t stream_length, double alpha);

/// One cell: split, acquire under B, train the evaluation tree on the
/// acquired set, score the held-out rows. policy == nullopt runs the Complete
/// baseline (full acquisition; reported with alpha 1).
SweepRow run_once(const Dataset& dataset, std::optional<PolicyKind> policy, double alpha, std::uint64_t seed,
                  const SweepConfig& config);

/// Full grid. Cells run in parallel with OpenMP; sweep_serial is the
/// single-threaded reference and returns an identical result.
SweepResult sweep(const Dataset& dataset, const SweepConfig& config);
SweepResult sweep_serial(const Dataset& dataset, const SweepConfig& config);

/// Mean and sample standard deviation per (policy, alpha). Complete rows are
/// repeated at every alpha of the grid.
std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows, const SweepConfig& config);

void write_results_csv(const SweepResult& result, std::ostream& out);
void write_aggregate_csv(const SweepResult& result, std::ostream& out);

}  // namespace budget_stream
