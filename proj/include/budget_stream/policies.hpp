#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "budget_stream/cost.hpp"
#include "budget_stream/cost_tree.hpp"
#include "budget_stream/dataset.hpp"
#include "budget_stream/feature_stats.hpp"
#include "budget_stream/instance.hpp"
#include "budget_stream/rng.hpp"

namespace budget_stream {

enum class PolicyKind { PureRandom, CostRandom, VarianceCost, TreeBased, Oracle };

std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);
bool is_adaptive(PolicyKind kind);

struct PolicyParams {
  double warmup_fraction = 0.2;
  double variance_floor = 1e-6;
  int rebuild_interval = 1;
  TreeParams tree;

  void validate() const;
};

/// Budget split of the adaptive policies: the first complete_count instances
/// are acquired in full, the rest share remaining_budget equally.
struct WarmupPlan {
  double warmup_fraction = 0.2;
  std::size_t complete_count = 0;
  Cost remaining_budget;
  std::size_t remaining_count = 0;

  static WarmupPlan make(Cost total_budget, std::size_t stream_length, Cost full_cost,
                         double warmup_fraction);
};

struct SelectionDistribution {
  std::vector<std::pair<FeatureId, double>> entries;

  double probability(FeatureId f) const;
};

/// Normalizes nonnegative weights over pf. All-equal weights give exactly
/// 1/|pf|. Throws ContractError on an empty pf or a zero total.
SelectionDistribution normalize_weights(std::span<const FeatureId> pf, std::span<const double> weights);

/// Draws one feature from the distribution with the supplied generator.
FeatureId sample(const SelectionDistribution& dist, Rng& rng);

/// Features ranked by info_gain / cost on complete data, descending; ties go
/// to the cheaper feature, then the lower id.
std::vector<FeatureId> oracle_rank(const Dataset& dataset, std::span<const std::size_t> rows);
std::vector<FeatureId> oracle_rank(const Dataset& dataset);
/// Per-feature info gain; the OpenMP variant matches the serial one exactly.
std::vector<double> feature_gains_serial(const Dataset& dataset, std::span<const std::size_t> rows);
std::vector<double> feature_gains(const Dataset& dataset, std::span<const std::size_t> rows);

struct WalkAction {
  enum class Kind { Acquire, FallBack, LeafReached };
  Kind kind;
  FeatureId feature = 0;  // meaningful for Acquire

  friend bool operator==(const WalkAction&, const WalkAction&) = default;
};

/// Walks `tree` from the root using the instance's acquired values. Nodes on
/// already-acquired features are descended free of charge.
WalkAction tree_walk_step(const DecisionTree& tree, const Instance& instance, std::span<const FeatureId> pf);

/// Acquisition policy: allocates b(x) and picks the next feature from PF(x).
class AcquisitionPolicy {
 public:
  virtual ~AcquisitionPolicy() = default;

  PolicyKind kind() const { return kind_; }
  const CostVector& costs() const { return costs_; }

  /// Called once before the first instance.
  virtual void begin_stream(Cost total_budget, std::size_t stream_length);
  /// b(x) for the instance at `position` in arrival order.
  virtual Cost allocate_budget(std::size_t position) const;
  virtual void begin_instance(std::size_t position) { position_ = position; }

  virtual SelectionDistribution selection_distribution(std::span<const FeatureId> pf) const = 0;
  /// Default: sample from selection_distribution. pf must be nonempty.
  virtual FeatureId select_feature(std::span<const FeatureId> pf, const Instance& instance);
  /// Called with the finalized instance; `training` already contains it.
  virtual void update(const Instance& completed, const TrainingSet& training);

 protected:
  AcquisitionPolicy(PolicyKind kind, CostVector costs, std::uint64_t seed);

  PolicyKind kind_;
  CostVector costs_;
  Rng rng_;
  Cost total_budget_;
  std::size_t stream_length_ = 0;
  std::size_t position_ = 0;
};

class PureRandomPolicy final : public AcquisitionPolicy {
 public:
  PureRandomPolicy(CostVector costs, std::uint64_t seed);
  SelectionDistribution selection_distribution(std::span<const FeatureId> pf) const override;
};

class CostRandomPolicy final : public AcquisitionPolicy {
 public:
  CostRandomPolicy(CostVector costs, std::uint64_t seed);
  SelectionDistribution selection_distribution(std::span<const FeatureId> pf) const override;
};

/// p(f) proportional to rescaled variance / cost, with variance floored.
class VarianceCostPolicy : public AcquisitionPolicy {
 public:
  VarianceCostPolicy(CostVector costs, std::uint64_t seed, const PolicyParams& params);

  void begin_stream(Cost total_budget, std::size_t stream_length) override;
  Cost allocate_budget(std::size_t position) const override;
  SelectionDistribution selection_distribution(std::span<const FeatureId> pf) const override;
  FeatureId select_feature(std::span<const FeatureId> pf, const Instance& instance) override;
  void update(const Instance& completed, const TrainingSet& training) override;

  const WarmupPlan& warmup() const { return warmup_; }
  const std::vector<FeatureStats>& stats() const { return stats_; }
  bool in_warmup() const { return position_ < warmup_.complete_count; }

 protected:
  VarianceCostPolicy(PolicyKind kind, CostVector costs, std::uint64_t seed, const PolicyParams& params);

  PolicyParams params_;
  WarmupPlan warmup_;
  std::vector<FeatureStats> stats_;
};

/// Walks a cost-sensitive tree grown on the training set so far; falls back
/// to variance/cost sampling at a leaf or at an unaffordable node.
class TreeBasedPolicy final : public VarianceCostPolicy {
 public:
  TreeBasedPolicy(CostVector costs, int class_count, std::uint64_t seed, const PolicyParams& params);

  FeatureId select_feature(std::span<const FeatureId> pf, const Instance& instance) override;
  void update(const Instance& completed, const TrainingSet& training) override;

  const std::optional<DecisionTree>& tree() const { return tree_; }
  std::size_t rebuild_count() const { return rebuilds_; }

 private:
  int class_count_;
  std::optional<DecisionTree> tree_;
  std::size_t updates_ = 0;
  std::size_t rebuilds_ = 0;
};

/// Upper-bound reference: equal budgets, features taken in a fixed order
/// computed from complete data.
class OraclePolicy final : public AcquisitionPolicy {
 public:
  OraclePolicy(CostVector costs, std::vector<FeatureId> order);

  SelectionDistribution selection_distribution(std::span<const FeatureId> pf) const override;
  FeatureId select_feature(std::span<const FeatureId> pf, const Instance& instance) override;

  const std::vector<FeatureId>& order() const { return order_; }

 private:
  std::vector<FeatureId> order_;
  std::vector<std::size_t> rank_;
};

struct PolicySetup {
  CostVector costs;
  int class_count = 2;
  std::uint64_t seed = 0;
  PolicyParams params;
  std::vector<FeatureId> oracle_order;  // required for Oracle
};

std::unique_ptr<AcquisitionPolicy> make_policy(PolicyKind kind, const PolicySetup& setup);

}  // namespace budget_stream
