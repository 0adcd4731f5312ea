#include "budget_stream/engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>

#include "budget_stream/error.hpp"

namespace budget_stream {

TrainingSet complete_instances(const Dataset& dataset, std::span<const std::size_t> rows) {
  TrainingSet out;
  out.reserve(rows.size());
  const CostVector costs = dataset.costs();
  for (std::size_t r : rows) {
    Instance x;
    x.row = r;
    x.values.assign(dataset.row(r).begin(), dataset.row(r).end());
    x.acquisition_order.resize(dataset.feature_count());
    for (FeatureId f = 0; f < dataset.feature_count(); ++f) x.acquisition_order[f] = f;
    x.spent = total_cost(costs);
    x.budget = x.spent;
    x.label = dataset.label(r);
    out.push_back(std::move(x));
  }
  return out;
}

PotentialSet prune_pf(std::span<const FeatureId> pf, Cost spent, Cost budget, const CostVector& costs) {
  PotentialSet kept;
  kept.reserve(pf.size());
  for (FeatureId f : pf)
    if (costs[f] + spent <= budget) kept.push_back(f);
  return kept;
}

void acquire(Instance& instance, FeatureId feature, const Dataset& dataset, const CostVector& costs) {
  if (feature >= costs.size()) throw ContractError(fmt::format("acquire: feature {} out of range", feature));
  if (instance.has(feature)) throw ContractError(fmt::format("acquire: feature {} already acquired", feature));
  if (instance.spent + costs[feature] > instance.budget)
    throw ContractError(fmt::format("acquire: feature {} exceeds the instance budget", feature));
  instance.values[feature] = dataset.value(instance.row, feature);
  instance.acquisition_order.push_back(feature);
  instance.spent += costs[feature];
}

namespace {

void check_step(const Instance& x, const PotentialSet& pf, const CostVector& costs, Cost allocated,
                Cost total_budget) {
  if (x.spent > x.budget) throw ContractError("budget safety violated: c(x) > b(x)");
  if (allocated > total_budget) throw ContractError("budget safety violated: sum of b(x) > B");
  for (FeatureId f : pf) {
    if (x.has(f)) throw ContractError("potential set contains an acquired feature");
    if (costs[f] + x.spent > x.budget) throw ContractError("potential set contains an unaffordable feature");
  }
}

}  // namespace

StreamResult run_stream(const Dataset& dataset, const StreamSplit& split, AcquisitionPolicy& policy,
                        Cost total_budget, const EngineOptions& options) {
  if (total_budget < Cost{}) throw ParameterError("total budget must be >= 0");
  const CostVector& costs = policy.costs();
  if (costs.size() != dataset.feature_count())
    throw ParameterError("policy cost vector does not match the dataset's features");
  const std::size_t n = dataset.feature_count();

  StreamResult result;
  result.total_budget = total_budget;
  result.training.reserve(split.stream.size());
  result.trace.reserve(split.stream.size());
  policy.begin_stream(total_budget, split.stream.size());

  Cost carry;
  for (std::size_t position = 0; position < split.stream.size(); ++position) {
    const Cost fresh = policy.allocate_budget(position);
    result.total_allocated += fresh;

    Instance x;
    x.row = split.stream[position];
    x.values.assign(n, std::nullopt);
    x.budget = fresh + carry;
    policy.begin_instance(position);

    PotentialSet pf;
    for (FeatureId f = 0; f < n; ++f)
      if (costs[f] <= x.budget) pf.push_back(f);
    check_step(x, pf, costs, result.total_allocated, total_budget);

    TraceRecord record;
    record.instance_index = position;
    record.budget = x.budget;
    while (!pf.empty()) {
      const FeatureId best = policy.select_feature(pf, x);
      if (std::find(pf.begin(), pf.end(), best) == pf.end())
        throw ContractError(fmt::format("policy selected feature {} outside PF(x)", best));
      acquire(x, best, dataset, costs);
      record.acquisitions.emplace_back(best, costs[best]);
      std::erase(pf, best);
      pf = prune_pf(pf, x.spent, x.budget, costs);
      check_step(x, pf, costs, result.total_allocated, total_budget);
      if (options.observer) options.observer({position, x, pf, result.total_allocated, total_budget});
    }

    x.label = dataset.label(x.row);
    record.leftover = x.budget - x.spent;
    carry = options.rollover_leftover ? record.leftover : Cost{};
    result.total_spent += x.spent;
    result.trace.push_back(std::move(record));
    result.training.push_back(std::move(x));
    policy.update(result.training.back(), result.training);
    if (options.observer)
      options.observer({position, result.training.back(), pf, result.total_allocated, total_budget});
  }
  if (result.total_spent > total_budget) throw ContractError("budget safety violated: total spend > B");
  return result;
}

void write_trace_csv(const AcquisitionTrace& trace, const std::vector<FeatureSpec>& features, std::ostream& out) {
  out << "instance_index,budget,feature,cost,cumulative_spent,leftover\n";
  for (const auto& rec : trace) {
    const std::string budget = rec.budget.to_string();
    const std::string leftover = rec.leftover.to_string();
    if (rec.acquisitions.empty()) {
      out << rec.instance_index << ',' << budget << ",,,0," << leftover << '\n';
      continue;
    }
    Cost cumulative;
    for (const auto& [f, c] : rec.acquisitions) {
      cumulative += c;
      out << rec.instance_index << ',' << budget << ',' << features[f].name << ',' << c.to_string() << ','
          << cumulative.to_string() << ',' << leftover << '\n';
    }
  }
}

void write_training_csv(const TrainingSet& training, const Dataset& dataset, std::ostream& out) {
  for (const auto& f : dataset.features()) out << f.name << ',';
  out << "label\n";
  for (const auto& x : training) {
    for (const auto& v : x.values) {
      if (v) out << fmt::format("{}", *v);
      out << ',';
    }
    if (x.label) out << dataset.class_names()[static_cast<std::size_t>(*x.label)];
    out << '\n';
  }
}

}  // namespace budget_stream
