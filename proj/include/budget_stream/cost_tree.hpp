#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "budget_stream/cost.hpp"
#include "budget_stream/dataset.hpp"
#include "budget_stream/instance.hpp"

namespace budget_stream {

enum class MissingPolicy { WeightedBranches, MajorityBranch };

struct TreeParams {
  int max_depth = 12;
  double min_leaf = 5.0;
  double cost_exponent = 1.0;  // split score is gain / cost^cost_exponent
  MissingPolicy missing_policy = MissingPolicy::WeightedBranches;

  void validate() const;
};

struct SplitResult {
  double gain = 0.0;  // bits
  double threshold = 0.0;
};

/// Single-feature information gain at the best binary threshold. Candidate
/// thresholds are midpoints between consecutive distinct present values.
/// Missing values are left out and the gain is scaled by the present
/// fraction. Fewer than two present values, or a constant feature, yields
/// gain 0 (threshold = the constant, or 0 when nothing is present).
SplitResult info_gain(std::span<const std::optional<double>> values,
                      std::span<const ClassId> labels, int class_count);

namespace detail {

struct WeightedValue {
  double value;
  ClassId label;
  double weight;
};

/// Best threshold over present values already sorted ascending. total_weight
/// includes items missing the feature; the gain is scaled by the present share.
SplitResult scan_sorted(std::span<const WeightedValue> present, double total_weight, int class_count,
                        double min_side);

/// Weighted core of info_gain. Both sides of an accepted threshold must
/// carry at least min_side present weight.
SplitResult best_split(std::span<const std::optional<double>> values,
                       std::span<const ClassId> labels, std::span<const double> weights,
                       int class_count, double min_side);

double entropy_bits(std::span<const double> class_weights);

}  // namespace detail

struct InnerNode {
  FeatureId feature = 0;
  double threshold = 0.0;  // value <= threshold goes left
  std::size_t left = 0;
  std::size_t right = 0;
  double left_mass = 0.0;   // training weight routed by a present value
  double right_mass = 0.0;

  friend bool operator==(const InnerNode&, const InnerNode&) = default;
};

struct LeafNode {
  std::vector<double> class_counts;

  friend bool operator==(const LeafNode&, const LeafNode&) = default;
};

using TreeNode = std::variant<InnerNode, LeafNode>;

class DecisionTree {
 public:
  DecisionTree(std::vector<TreeNode> nodes, int class_count, MissingPolicy missing_policy);

  /// Builds a single leaf from class counts.
  static DecisionTree leaf(std::vector<double> class_counts,
                           MissingPolicy missing_policy = MissingPolicy::WeightedBranches);

  const TreeNode& node(std::size_t index) const { return nodes_[index]; }
  const TreeNode& root() const { return nodes_.front(); }
  std::size_t node_count() const { return nodes_.size(); }
  int class_count() const { return class_count_; }
  int depth() const;

  /// Laplace-smoothed class distribution, (count + 1) / (total + k) at the
  /// leaves. A missing split feature blends both children by training mass
  /// (WeightedBranches) or follows the heavier child (MajorityBranch).
  std::vector<double> predict_scores(std::span<const std::optional<double>> instance) const;
  std::vector<double> predict_scores(std::span<const double> instance) const;

  /// Indented debug dump; not a stable format.
  std::string to_text(const std::vector<FeatureSpec>& features) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  void accumulate(std::size_t index, std::span<const std::optional<double>> instance, double weight,
                  std::vector<double>& out) const;

  std::vector<TreeNode> nodes_;
  int class_count_;
  MissingPolicy missing_policy_;
};

/// Cost-sensitive C4.5-style induction. Every node picks the split that
/// maximizes gain / cost^omega; instances missing the split feature are
/// routed per the missing policy. Throws ParameterError on an empty or
/// unlabeled training set.
DecisionTree induce(std::span<const Instance> train, const CostVector& costs, int class_count,
                    const TreeParams& params);

/// Serial and OpenMP batch prediction over complete rows (one score vector
/// per row). Results are identical.
std::vector<std::vector<double>> predict_rows_serial(const DecisionTree& tree, const Dataset& dataset,
                                                     std::span<const std::size_t> rows);
std::vector<std::vector<double>> predict_rows(const DecisionTree& tree, const Dataset& dataset,
                                              std::span<const std::size_t> rows);

std::optional<MissingPolicy> parse_missing_policy(std::string_view name);

}  // namespace budget_stream
