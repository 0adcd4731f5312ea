// Serial reference vs OpenMP variants of the data-parallel kernels.

#include <benchmark/benchmark.h>

#include <numeric>

#include "budget_stream/cost_tree.hpp"
#include "budget_stream/dataset.hpp"
#include "budget_stream/harness.hpp"
#include "budget_stream/metrics.hpp"
#include "budget_stream/policies.hpp"
#include "budget_stream/rng.hpp"

namespace bs = budget_stream;

namespace {

const bs::Dataset& wide_dataset() {
  static const bs::Dataset d = bs::generate_synthetic({5000, 4, 60, bs::CostProfile::Uniform, 3, 0.03});
  return d;
}

std::vector<std::size_t> all_rows(const bs::Dataset& d) {
  std::vector<std::size_t> rows(d.row_count());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

bs::SweepConfig small_grid() {
  bs::SweepConfig c;
  c.policies = {bs::PolicyKind::PureRandom, bs::PolicyKind::CostRandom, bs::PolicyKind::VarianceCost,
                bs::PolicyKind::Oracle};
  c.alphas = {0.1, 0.3, 0.5};
  c.runs = 2;
  c.base_seed = 11;
  return c;
}

void BM_FeatureGainsSerial(benchmark::State& state) {
  const auto rows = all_rows(wide_dataset());
  for (auto _ : state) benchmark::DoNotOptimize(bs::feature_gains_serial(wide_dataset(), rows));
}
BENCHMARK(BM_FeatureGainsSerial)->Unit(benchmark::kMillisecond);

void BM_FeatureGainsOmp(benchmark::State& state) {
  const auto rows = all_rows(wide_dataset());
  for (auto _ : state) benchmark::DoNotOptimize(bs::feature_gains(wide_dataset(), rows));
}
BENCHMARK(BM_FeatureGainsOmp)->Unit(benchmark::kMillisecond);

void BM_PredictRowsSerial(benchmark::State& state) {
  const auto rows = all_rows(wide_dataset());
  const auto train = bs::complete_instances(wide_dataset(), rows);
  const auto tree = bs::induce(train, wide_dataset().costs(), 2, {});
  for (auto _ : state) benchmark::DoNotOptimize(bs::predict_rows_serial(tree, wide_dataset(), rows));
}
BENCHMARK(BM_PredictRowsSerial)->Unit(benchmark::kMillisecond);

void BM_PredictRowsOmp(benchmark::State& state) {
  const auto rows = all_rows(wide_dataset());
  const auto train = bs::complete_instances(wide_dataset(), rows);
  const auto tree = bs::induce(train, wide_dataset().costs(), 2, {});
  for (auto _ : state) benchmark::DoNotOptimize(bs::predict_rows(tree, wide_dataset(), rows));
}
BENCHMARK(BM_PredictRowsOmp)->Unit(benchmark::kMillisecond);

std::vector<bs::ScoredPrediction> random_predictions(int classes, std::size_t n) {
  bs::Rng rng(5);
  std::vector<bs::ScoredPrediction> preds(n);
  for (auto& p : preds) {
    p.scores.resize(static_cast<std::size_t>(classes));
    double total = 0.0;
    for (auto& s : p.scores) total += (s = rng.uniform());
    for (auto& s : p.scores) s /= total;
    p.true_label = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
  }
  return preds;
}

void BM_AucMulticlassSerial(benchmark::State& state) {
  const auto preds = random_predictions(12, 20000);
  for (auto _ : state) benchmark::DoNotOptimize(bs::auc_multiclass(preds, 12));
}
BENCHMARK(BM_AucMulticlassSerial)->Unit(benchmark::kMillisecond);

void BM_AucMulticlassOmp(benchmark::State& state) {
  const auto preds = random_predictions(12, 20000);
  for (auto _ : state) benchmark::DoNotOptimize(bs::auc_multiclass_parallel(preds, 12));
}
BENCHMARK(BM_AucMulticlassOmp)->Unit(benchmark::kMillisecond);

void BM_SweepSerial(benchmark::State& state) {
  const bs::Dataset d = bs::generate_synthetic({1000, 2, 10, bs::CostProfile::InformativeCheap, 1, 0.03});
  for (auto _ : state) benchmark::DoNotOptimize(bs::sweep_serial(d, small_grid()));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_SweepOmp(benchmark::State& state) {
  const bs::Dataset d = bs::generate_synthetic({1000, 2, 10, bs::CostProfile::InformativeCheap, 1, 0.03});
  for (auto _ : state) benchmark::DoNotOptimize(bs::sweep(d, small_grid()));
}
BENCHMARK(BM_SweepOmp)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
