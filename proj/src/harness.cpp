#include "budget_stream/harness.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <cmath>
#include <exception>
#include <map>
#include <ostream>

#include "budget_stream/engine.hpp"
#include "budget_stream/error.hpp"
#include "budget_stream/metrics.hpp"

namespace budget_stream {

void SweepConfig::validate() const {
  if (policies.empty() && !include_complete) throw ParameterError("sweep has no policies");
  if (alphas.empty()) throw ParameterError("sweep needs at least one alpha");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] <= 1.0)) throw ParameterError("alphas must lie in (0, 1]");
    if (i > 0 && !(alphas[i] > alphas[i - 1])) throw ParameterError("alphas must be strictly increasing");
  }
  if (runs < 1) throw ParameterError("runs must be >= 1");
  if (threads < 0) throw ParameterError("threads must be >= 0");
  policy_params.validate();
  eval_tree.validate();
}

std::uint64_t run_seed(std::uint64_t base_seed, int run) {
  return mix64(base_seed ^ mix64(static_cast<std::uint64_t>(run) + 1));
}

std::uint64_t policy_seed(std::uint64_t seed, std::string_view policy, double alpha) {
  const auto alpha_ppm = static_cast<std::uint64_t>(std::llround(alpha * 1e6));
  return mix64(seed ^ mix64(hash_string(policy) ^ mix64(alpha_ppm)));
}

Cost sweep_budget(const Dataset& dataset, std::size_t stream_length, double alpha) {
  return scale_budget(alpha, static_cast<std::int64_t>(stream_length), total_cost(dataset.costs()));
}

SweepRow run_once(const Dataset& dataset, std::optional<PolicyKind> policy, double alpha, std::uint64_t seed,
                  const SweepConfig& config) {
  const StreamSplit split = split_stream(dataset, seed);
  const std::string name(policy ? policy_name(*policy) : kCompletePolicyName);
  const double effective_alpha = policy ? alpha : 1.0;

  PolicySetup setup;
  setup.costs = dataset.costs();
  setup.class_count = dataset.class_count();
  setup.seed = policy_seed(seed, name, effective_alpha);
  setup.params = config.policy_params;
  // Full acquisition does not depend on the selection rule.
  const PolicyKind kind = policy.value_or(PolicyKind::PureRandom);
  // The oracle ranks on the complete stream, data no online learner could see.
  if (kind == PolicyKind::Oracle) setup.oracle_order = oracle_rank(dataset, split.stream);
  auto acquisition = make_policy(kind, setup);

  const Cost budget = sweep_budget(dataset, split.stream.size(), effective_alpha);
  const StreamResult stream = run_stream(dataset, split, *acquisition, budget);

  const DecisionTree tree = induce(stream.training, setup.costs, dataset.class_count(), config.eval_tree);
  const auto scores = predict_rows_serial(tree, dataset, split.test);
  std::vector<ScoredPrediction> preds(split.test.size());
  for (std::size_t i = 0; i < split.test.size(); ++i) preds[i] = {scores[i], dataset.label(split.test[i])};

  SweepRow row;
  row.policy = name;
  row.alpha = effective_alpha;
  row.seed = seed;
  row.auc = auc_multiclass(preds, dataset.class_count());
  row.total_spent = stream.total_spent;
  for (const auto& x : stream.training) row.full_instances += x.complete();
  return row;
}

namespace {

struct Cell {
  std::optional<PolicyKind> policy;
  double alpha;
  int run;
};

std::vector<Cell> grid(const SweepConfig& config) {
  std::vector<Cell> cells;
  for (PolicyKind p : config.policies)
    for (double a : config.alphas)
      for (int r = 0; r < config.runs; ++r) cells.push_back({p, a, r});
  if (config.include_complete)
    for (int r = 0; r < config.runs; ++r) cells.push_back({std::nullopt, 1.0, r});
  return cells;
}

SweepRow run_cell(const Dataset& dataset, const Cell& cell, const SweepConfig& config) {
  try {
    return run_once(dataset, cell.policy, cell.alpha, run_seed(config.base_seed, cell.run), config);
  } catch (const std::exception& e) {
    const std::string_view name = cell.policy ? policy_name(*cell.policy) : kCompletePolicyName;
    throw std::runtime_error(
        fmt::format("sweep cell (policy={}, alpha={}, run={}) failed: {}", name, cell.alpha, cell.run, e.what()));
  }
}

SweepResult finish(std::vector<SweepRow> rows, const SweepConfig& config) {
  SweepResult result;
  result.aggregates = aggregate(rows, config);
  result.rows = std::move(rows);
  return result;
}

}  // namespace

SweepResult sweep_serial(const Dataset& dataset, const SweepConfig& config) {
  config.validate();
  const auto cells = grid(config);
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const auto& cell : cells) rows.push_back(run_cell(dataset, cell, config));
  return finish(std::move(rows), config);
}

SweepResult sweep(const Dataset& dataset, const SweepConfig& config) {
  config.validate();
  const auto cells = grid(config);
  std::vector<SweepRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
  const auto count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      rows[u] = run_cell(dataset, cells[u], config);
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return finish(std::move(rows), config);
}

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows, const SweepConfig& config) {
  auto summarize = [](const std::string& policy, double alpha, const std::vector<double>& aucs) {
    SweepAggregate agg{policy, alpha, 0.0, 0.0};
    if (aucs.empty()) return agg;
    double sum = 0.0;
    for (double a : aucs) sum += a;
    agg.mean_auc = sum / static_cast<double>(aucs.size());
    if (aucs.size() > 1) {
      double ss = 0.0;
      for (double a : aucs) ss += (a - agg.mean_auc) * (a - agg.mean_auc);
      agg.std_auc = std::sqrt(ss / static_cast<double>(aucs.size() - 1));
    }
    return agg;
  };

  // Rows are grouped by key in their original order, so the result does not
  // depend on which thread finished first.
  std::map<std::pair<std::string, std::int64_t>, std::vector<double>> groups;
  for (const auto& row : rows) groups[{row.policy, std::llround(row.alpha * 1e6)}].push_back(row.auc);

  std::vector<SweepAggregate> out;
  for (PolicyKind p : config.policies) {
    const std::string name(policy_name(p));
    for (double a : config.alphas) {
      auto it = groups.find({name, std::llround(a * 1e6)});
      if (it != groups.end()) out.push_back(summarize(name, a, it->second));
    }
  }
  if (config.include_complete) {
    auto it = groups.find({std::string(kCompletePolicyName), std::llround(1e6)});
    if (it != groups.end())
      for (double a : config.alphas) out.push_back(summarize(std::string(kCompletePolicyName), a, it->second));
  }
  return out;
}

void write_results_csv(const SweepResult& result, std::ostream& out) {
  out << "policy,alpha,seed,auc,total_spent,full_instances\n";
  for (const auto& r : result.rows)
    out << fmt::format("{},{},{},{},{},{}\n", r.policy, r.alpha, r.seed, r.auc, r.total_spent.to_string(),
                       r.full_instances);
}

void write_aggregate_csv(const SweepResult& result, std::ostream& out) {
  out << "policy,alpha,mean_auc,std_auc\n";
  for (const auto& a : result.aggregates)
    out << fmt::format("{},{},{},{}\n", a.policy, a.alpha, a.mean_auc, a.std_auc);
}

}  // namespace budget_stream
