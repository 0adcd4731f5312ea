#include "budget_stream/policies.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "budget_stream/error.hpp"

namespace budget_stream {

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::PureRandom: return "pure-random";
    case PolicyKind::CostRandom: return "cost-random";
    case PolicyKind::VarianceCost: return "variance-cost";
    case PolicyKind::TreeBased: return "tree-based";
    case PolicyKind::Oracle: return "oracle";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (auto kind : {PolicyKind::PureRandom, PolicyKind::CostRandom, PolicyKind::VarianceCost,
                    PolicyKind::TreeBased, PolicyKind::Oracle}) {
    if (policy_name(kind) == name) return kind;
  }
  return std::nullopt;
}

bool is_adaptive(PolicyKind kind) { return kind == PolicyKind::VarianceCost || kind == PolicyKind::TreeBased; }

void PolicyParams::validate() const {
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0))
    throw ParameterError("warmup_fraction must lie in (0, 1)");
  if (!(variance_floor > 0.0) || !std::isfinite(variance_floor))
    throw ParameterError("variance_floor must be positive");
  if (rebuild_interval < 1) throw ParameterError("rebuild_interval must be >= 1");
  tree.validate();
}

WarmupPlan WarmupPlan::make(Cost total_budget, std::size_t stream_length, Cost full_cost,
                            double warmup_fraction) {
  WarmupPlan plan;
  plan.warmup_fraction = warmup_fraction;
  const Cost warmup_budget = scale_budget(warmup_fraction, 1, total_budget);
  const auto affordable = static_cast<std::size_t>(whole_multiples(warmup_budget, full_cost));
  plan.complete_count = std::min(affordable, stream_length);
  plan.remaining_budget = total_budget - full_cost * static_cast<std::int64_t>(plan.complete_count);
  plan.remaining_count = stream_length - plan.complete_count;
  return plan;
}

double SelectionDistribution::probability(FeatureId f) const {
  for (const auto& [id, p] : entries)
    if (id == f) return p;
  return 0.0;
}

SelectionDistribution normalize_weights(std::span<const FeatureId> pf, std::span<const double> weights) {
  if (pf.empty()) throw ContractError("selection over an empty potential set");
  if (pf.size() != weights.size()) throw ContractError("normalize_weights: size mismatch");
  SelectionDistribution dist;
  dist.entries.reserve(pf.size());
  const bool uniform = std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights[0]; });
  if (uniform && weights[0] > 0.0) {
    const double p = 1.0 / static_cast<double>(pf.size());
    for (FeatureId f : pf) dist.entries.emplace_back(f, p);
    return dist;
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractError("negative selection weight");
    total += w;
  }
  if (!(total > 0.0)) throw ContractError("selection weights sum to zero");
  for (std::size_t i = 0; i < pf.size(); ++i) dist.entries.emplace_back(pf[i], weights[i] / total);
  return dist;
}

FeatureId sample(const SelectionDistribution& dist, Rng& rng) {
  if (dist.entries.empty()) throw ContractError("sampling from an empty distribution");
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const auto& [f, p] : dist.entries) {
    cumulative += p;
    if (u < cumulative) return f;
  }
  // u landed in the rounding gap above the last cumulative sum.
  for (auto it = dist.entries.rbegin(); it != dist.entries.rend(); ++it)
    if (it->second > 0.0) return it->first;
  return dist.entries.back().first;
}

// ---------------------------------------------------------------------------
// Oracle ranking

namespace {

double feature_gain(const Dataset& dataset, std::span<const std::size_t> rows, FeatureId f,
                    std::vector<std::optional<double>>& values, std::vector<ClassId>& labels) {
  values.resize(rows.size());
  labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    values[i] = dataset.value(rows[i], f);
    labels[i] = dataset.label(rows[i]);
  }
  return info_gain(values, labels, dataset.class_count()).gain;
}

std::vector<FeatureId> rank_by_gain_per_cost(const Dataset& dataset, const std::vector<double>& gains) {
  const auto& features = dataset.features();
  std::vector<FeatureId> order(features.size());
  std::iota(order.begin(), order.end(), FeatureId{0});
  std::sort(order.begin(), order.end(), [&](FeatureId a, FeatureId b) {
    const double sa = gains[a] / features[a].cost.to_double();
    const double sb = gains[b] / features[b].cost.to_double();
    if (sa != sb) return sa > sb;
    if (features[a].cost != features[b].cost) return features[a].cost < features[b].cost;
    return a < b;
  });
  return order;
}

}  // namespace

std::vector<double> feature_gains_serial(const Dataset& dataset, std::span<const std::size_t> rows) {
  std::vector<double> gains(dataset.feature_count());
  std::vector<std::optional<double>> values;
  std::vector<ClassId> labels;
  for (FeatureId f = 0; f < gains.size(); ++f) gains[f] = feature_gain(dataset, rows, f, values, labels);
  return gains;
}

std::vector<double> feature_gains(const Dataset& dataset, std::span<const std::size_t> rows) {
  std::vector<double> gains(dataset.feature_count());
  const auto n = static_cast<std::ptrdiff_t>(gains.size());
#pragma omp parallel
  {
    std::vector<std::optional<double>> values;
    std::vector<ClassId> labels;
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t f = 0; f < n; ++f)
      gains[static_cast<std::size_t>(f)] = feature_gain(dataset, rows, static_cast<FeatureId>(f), values, labels);
  }
  return gains;
}

std::vector<FeatureId> oracle_rank(const Dataset& dataset, std::span<const std::size_t> rows) {
  return rank_by_gain_per_cost(dataset, feature_gains(dataset, rows));
}

std::vector<FeatureId> oracle_rank(const Dataset& dataset) {
  std::vector<std::size_t> rows(dataset.row_count());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return oracle_rank(dataset, rows);
}

// ---------------------------------------------------------------------------
// Tree walk

WalkAction tree_walk_step(const DecisionTree& tree, const Instance& instance, std::span<const FeatureId> pf) {
  std::size_t index = 0;
  while (true) {
    const auto* inner = std::get_if<InnerNode>(&tree.node(index));
    if (!inner) return {WalkAction::Kind::LeafReached};
    if (instance.has(inner->feature)) {
      index = *instance.values[inner->feature] <= inner->threshold ? inner->left : inner->right;
      continue;
    }
    if (std::find(pf.begin(), pf.end(), inner->feature) != pf.end())
      return {WalkAction::Kind::Acquire, inner->feature};
    return {WalkAction::Kind::FallBack};
  }
}

// ---------------------------------------------------------------------------
// Policies

AcquisitionPolicy::AcquisitionPolicy(PolicyKind kind, CostVector costs, std::uint64_t seed)
    : kind_(kind), costs_(std::move(costs)), rng_(seed) {
  if (costs_.empty()) throw ParameterError("policy needs at least one feature");
  for (Cost c : costs_)
    if (c <= Cost{}) throw ParameterError("feature costs must be positive");
}

void AcquisitionPolicy::begin_stream(Cost total_budget, std::size_t stream_length) {
  if (total_budget < Cost{}) throw ParameterError("total budget must be >= 0");
  total_budget_ = total_budget;
  stream_length_ = stream_length;
}

Cost AcquisitionPolicy::allocate_budget(std::size_t /*position*/) const {
  if (stream_length_ == 0) return Cost{};
  return divide_floor(total_budget_, static_cast<std::int64_t>(stream_length_));
}

FeatureId AcquisitionPolicy::select_feature(std::span<const FeatureId> pf, const Instance& /*instance*/) {
  if (pf.empty()) throw ContractError("select_feature on an empty potential set");
  if (pf.size() == 1) return pf.front();
  return sample(selection_distribution(pf), rng_);
}

void AcquisitionPolicy::update(const Instance& /*completed*/, const TrainingSet& /*training*/) {}

PureRandomPolicy::PureRandomPolicy(CostVector costs, std::uint64_t seed)
    : AcquisitionPolicy(PolicyKind::PureRandom, std::move(costs), seed) {}

SelectionDistribution PureRandomPolicy::selection_distribution(std::span<const FeatureId> pf) const {
  const std::vector<double> ones(pf.size(), 1.0);
  return normalize_weights(pf, ones);
}

CostRandomPolicy::CostRandomPolicy(CostVector costs, std::uint64_t seed)
    : AcquisitionPolicy(PolicyKind::CostRandom, std::move(costs), seed) {}

SelectionDistribution CostRandomPolicy::selection_distribution(std::span<const FeatureId> pf) const {
  std::vector<double> weights;
  weights.reserve(pf.size());
  for (FeatureId f : pf) weights.push_back(1.0 / costs_.at(f).to_double());
  return normalize_weights(pf, weights);
}

VarianceCostPolicy::VarianceCostPolicy(CostVector costs, std::uint64_t seed, const PolicyParams& params)
    : VarianceCostPolicy(PolicyKind::VarianceCost, std::move(costs), seed, params) {}

VarianceCostPolicy::VarianceCostPolicy(PolicyKind kind, CostVector costs, std::uint64_t seed,
                                       const PolicyParams& params)
    : AcquisitionPolicy(kind, std::move(costs), seed), params_(params), stats_(costs_.size()) {
  params_.validate();
}

void VarianceCostPolicy::begin_stream(Cost total_budget, std::size_t stream_length) {
  AcquisitionPolicy::begin_stream(total_budget, stream_length);
  warmup_ = WarmupPlan::make(total_budget, stream_length, total_cost(costs_), params_.warmup_fraction);
}

Cost VarianceCostPolicy::allocate_budget(std::size_t position) const {
  if (position < warmup_.complete_count) return total_cost(costs_);
  if (warmup_.remaining_count == 0) return Cost{};
  return divide_floor(warmup_.remaining_budget, static_cast<std::int64_t>(warmup_.remaining_count));
}

SelectionDistribution VarianceCostPolicy::selection_distribution(std::span<const FeatureId> pf) const {
  std::vector<double> weights;
  weights.reserve(pf.size());
  for (FeatureId f : pf) {
    double variance = stats_.at(f).rescaled_variance().value_or(0.0);
    if (!(variance > 0.0)) variance = params_.variance_floor;
    weights.push_back(variance / costs_[f].to_double());
  }
  return normalize_weights(pf, weights);
}

FeatureId VarianceCostPolicy::select_feature(std::span<const FeatureId> pf, const Instance& instance) {
  if (pf.empty()) throw ContractError("select_feature on an empty potential set");
  // Warm-up instances take every feature; the order is irrelevant, so use ids.
  if (in_warmup()) return *std::min_element(pf.begin(), pf.end());
  return AcquisitionPolicy::select_feature(pf, instance);
}

void VarianceCostPolicy::update(const Instance& completed, const TrainingSet& /*training*/) {
  for (FeatureId f : completed.acquisition_order) stats_[f].observe(*completed.values[f]);
}

TreeBasedPolicy::TreeBasedPolicy(CostVector costs, int class_count, std::uint64_t seed,
                                 const PolicyParams& params)
    : VarianceCostPolicy(PolicyKind::TreeBased, std::move(costs), seed, params), class_count_(class_count) {
  if (class_count_ < 2) throw ParameterError("tree-based policy needs class_count >= 2");
}

FeatureId TreeBasedPolicy::select_feature(std::span<const FeatureId> pf, const Instance& instance) {
  if (pf.empty()) throw ContractError("select_feature on an empty potential set");
  if (!in_warmup() && tree_) {
    const WalkAction step = tree_walk_step(*tree_, instance, pf);
    if (step.kind == WalkAction::Kind::Acquire) return step.feature;
  }
  return VarianceCostPolicy::select_feature(pf, instance);
}

void TreeBasedPolicy::update(const Instance& completed, const TrainingSet& training) {
  VarianceCostPolicy::update(completed, training);
  ++updates_;
  if (updates_ % static_cast<std::size_t>(params_.rebuild_interval) != 0) return;
  tree_ = induce(training, costs_, class_count_, params_.tree);
  ++rebuilds_;
}

OraclePolicy::OraclePolicy(CostVector costs, std::vector<FeatureId> order)
    : AcquisitionPolicy(PolicyKind::Oracle, std::move(costs), 0),
      order_(std::move(order)),
      rank_(costs_.size(), std::numeric_limits<std::size_t>::max()) {
  if (order_.size() != costs_.size()) throw ParameterError("oracle order must rank every feature");
  for (std::size_t r = 0; r < order_.size(); ++r) {
    if (order_[r] >= costs_.size() || rank_[order_[r]] != std::numeric_limits<std::size_t>::max())
      throw ParameterError("oracle order must be a permutation of the feature ids");
    rank_[order_[r]] = r;
  }
}

SelectionDistribution OraclePolicy::selection_distribution(std::span<const FeatureId> pf) const {
  if (pf.empty()) throw ContractError("selection over an empty potential set");
  const FeatureId best = *std::min_element(pf.begin(), pf.end(), [&](FeatureId a, FeatureId b) { return rank_[a] < rank_[b]; });
  SelectionDistribution dist;
  for (FeatureId f : pf) dist.entries.emplace_back(f, f == best ? 1.0 : 0.0);
  return dist;
}

FeatureId OraclePolicy::select_feature(std::span<const FeatureId> pf, const Instance& /*instance*/) {
  if (pf.empty()) throw ContractError("select_feature on an empty potential set");
  return *std::min_element(pf.begin(), pf.end(), [&](FeatureId a, FeatureId b) { return rank_[a] < rank_[b]; });
}

std::unique_ptr<AcquisitionPolicy> make_policy(PolicyKind kind, const PolicySetup& setup) {
  switch (kind) {
    case PolicyKind::PureRandom: return std::make_unique<PureRandomPolicy>(setup.costs, setup.seed);
    case PolicyKind::CostRandom: return std::make_unique<CostRandomPolicy>(setup.costs, setup.seed);
    case PolicyKind::VarianceCost:
      return std::make_unique<VarianceCostPolicy>(setup.costs, setup.seed, setup.params);
    case PolicyKind::TreeBased:
      return std::make_unique<TreeBasedPolicy>(setup.costs, setup.class_count, setup.seed, setup.params);
    case PolicyKind::Oracle: return std::make_unique<OraclePolicy>(setup.costs, setup.oracle_order);
  }
  throw ParameterError("unknown policy kind");
}

}  // namespace budget_stream
