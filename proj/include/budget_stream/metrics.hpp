#pragma once

#include <span>
#include <vector>

#include "budget_stream/dataset.hpp"

namespace budget_stream {

struct ScoredPrediction {
  std::vector<double> scores;
  ClassId true_label = 0;
};

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked correctly,
/// ties counting one half. labels are 0/1; throws ParameterError if either
/// class is absent.
double auc_binary(std::span<const double> scores, std::span<const int> labels);

/// Macro average of one-vs-rest auc_binary over the classes present in the
/// labels. Throws ParameterError when fewer than two classes are present.
double auc_multiclass(std::span<const ScoredPrediction> preds, int class_count);

/// Same result with the per-class loop spread over OpenMP threads.
double auc_multiclass_parallel(std::span<const ScoredPrediction> preds, int class_count);

}  // namespace budget_stream
