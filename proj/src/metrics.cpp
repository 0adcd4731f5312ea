#include "budget_stream/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "budget_stream/error.hpp"

namespace budget_stream {

double auc_binary(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ParameterError("auc_binary: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw ParameterError("auc_binary: NaN score");
    if (labels[i] != 0 && labels[i] != 1) throw ParameterError("auc_binary: labels must be 0 or 1");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the Mann-Whitney U, accumulated exactly in integers.
  std::uint64_t twice_u = 0;
  std::uint64_t negatives_below = 0;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0, neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? pos : neg) += 1;
      ++j;
    }
    twice_u += pos * (2 * negatives_below + neg);
    negatives_below += neg;
    positives += pos;
    negatives += neg;
    i = j;
  }
  if (positives == 0 || negatives == 0) throw ParameterError("auc_binary: both classes must be present");
  // Dividing the smaller of U and its complement keeps auc(s) + auc(-s) == 1
  // exact in floating point.
  const std::uint64_t twice_pairs = 2 * positives * negatives;
  const auto denom = static_cast<double>(twice_pairs);
  if (2 * twice_u <= twice_pairs) return static_cast<double>(twice_u) / denom;
  return 1.0 - static_cast<double>(twice_pairs - twice_u) / denom;
}

namespace {

struct ClassColumn {
  std::vector<double> scores;
  std::vector<int> labels;
};

std::vector<int> present_classes(std::span<const ScoredPrediction> preds, int class_count) {
  std::vector<int> seen(static_cast<std::size_t>(class_count), 0);
  for (const auto& p : preds) {
    if (p.true_label < 0 || p.true_label >= class_count) throw ParameterError("auc_multiclass: label out of range");
    if (p.scores.size() != static_cast<std::size_t>(class_count))
      throw ParameterError("auc_multiclass: score vector has the wrong length");
    seen[static_cast<std::size_t>(p.true_label)] = 1;
  }
  std::vector<int> classes;
  for (int c = 0; c < class_count; ++c)
    if (seen[static_cast<std::size_t>(c)]) classes.push_back(c);
  if (classes.size() < 2) throw ParameterError("auc_multiclass: fewer than two classes present");
  return classes;
}

double one_vs_rest(std::span<const ScoredPrediction> preds, int c) {
  ClassColumn col;
  col.scores.reserve(preds.size());
  col.labels.reserve(preds.size());
  for (const auto& p : preds) {
    col.scores.push_back(p.scores[static_cast<std::size_t>(c)]);
    col.labels.push_back(p.true_label == c ? 1 : 0);
  }
  return auc_binary(col.scores, col.labels);
}

}  // namespace

double auc_multiclass(std::span<const ScoredPrediction> preds, int class_count) {
  const auto classes = present_classes(preds, class_count);
  double sum = 0.0;
  for (int c : classes) sum += one_vs_rest(preds, c);
  return sum / static_cast<double>(classes.size());
}

double auc_multiclass_parallel(std::span<const ScoredPrediction> preds, int class_count) {
  const auto classes = present_classes(preds, class_count);
  std::vector<double> per_class(classes.size());
  const auto count = static_cast<std::ptrdiff_t>(classes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i)
    per_class[static_cast<std::size_t>(i)] = one_vs_rest(preds, classes[static_cast<std::size_t>(i)]);
  // Summed in class order so the result matches the serial path bit for bit.
  double sum = 0.0;
  for (double a : per_class) sum += a;
  return sum / static_cast<double>(classes.size());
}

}  // namespace budget_stream
