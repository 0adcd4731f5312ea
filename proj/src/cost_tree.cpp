#include "budget_stream/cost_tree.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "budget_stream/error.hpp"

namespace budget_stream {

void TreeParams::validate() const {
  if (max_depth < 1) throw ParameterError("tree max_depth must be >= 1");
  if (!(min_leaf >= 1.0)) throw ParameterError("tree min_leaf must be >= 1");
  if (!(cost_exponent >= 0.0) || !std::isfinite(cost_exponent))
    throw ParameterError("tree cost_exponent must be >= 0");
}

std::optional<MissingPolicy> parse_missing_policy(std::string_view name) {
  if (name == "weighted") return MissingPolicy::WeightedBranches;
  if (name == "majority") return MissingPolicy::MajorityBranch;
  return std::nullopt;
}

namespace detail {

double entropy_bits(std::span<const double> class_weights) {
  double total = 0.0;
  for (double w : class_weights) total += w;
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double w : class_weights) {
    if (w > 0.0) {
      const double p = w / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

SplitResult scan_sorted(std::span<const WeightedValue> present, double total_weight, int class_count,
                        double min_side) {
  if (present.size() < 2) return {0.0, present.empty() ? 0.0 : present.front().value};
  const auto k = static_cast<std::size_t>(class_count);
  std::vector<double> right(k, 0.0);
  double present_weight = 0.0;
  for (const auto& p : present) {
    right[static_cast<std::size_t>(p.label)] += p.weight;
    present_weight += p.weight;
  }
  const double parent_entropy = entropy_bits(right);
  std::vector<double> left(k, 0.0);
  double left_weight = 0.0;

  bool found = false;
  SplitResult best{0.0, present.front().value};
  double best_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < present.size(); ++i) {
    const auto c = static_cast<std::size_t>(present[i].label);
    left[c] += present[i].weight;
    right[c] -= present[i].weight;
    left_weight += present[i].weight;
    if (present[i].value == present[i + 1].value) continue;
    const double right_weight = present_weight - left_weight;
    if (left_weight < min_side || right_weight < min_side) continue;
    const double children =
        (left_weight * entropy_bits(left) + right_weight * entropy_bits(right)) / present_weight;
    const double gain = parent_entropy - children;
    if (gain > best_gain) {
      best_gain = gain;
      best.threshold = 0.5 * (present[i].value + present[i + 1].value);
      found = true;
    }
  }
  if (!found) return {0.0, present.front().value};
  best.gain = std::max(0.0, best_gain) * (present_weight / total_weight);
  return best;
}

SplitResult best_split(std::span<const std::optional<double>> values, std::span<const ClassId> labels,
                       std::span<const double> weights, int class_count, double min_side) {
  if (values.size() != labels.size() || values.size() != weights.size())
    throw ParameterError("best_split: values, labels and weights differ in length");
  std::vector<WeightedValue> present;
  present.reserve(values.size());
  double total_weight = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    total_weight += weights[i];
    if (values[i]) present.push_back({*values[i], labels[i], weights[i]});
  }
  std::stable_sort(present.begin(), present.end(),
                   [](const WeightedValue& a, const WeightedValue& b) { return a.value < b.value; });
  return scan_sorted(present, total_weight, class_count, min_side);
}

}  // namespace detail

SplitResult info_gain(std::span<const std::optional<double>> values, std::span<const ClassId> labels,
                      int class_count) {
  if (class_count < 1) throw ParameterError("info_gain: class_count must be >= 1");
  for (ClassId y : labels)
    if (y < 0 || y >= class_count) throw ParameterError("info_gain: label out of range");
  const std::vector<double> ones(values.size(), 1.0);
  return detail::best_split(values, labels, ones, class_count, 0.0);
}

// ---------------------------------------------------------------------------
// DecisionTree

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, int class_count, MissingPolicy missing_policy)
    : nodes_(std::move(nodes)), class_count_(class_count), missing_policy_(missing_policy) {
  if (nodes_.empty()) throw ParameterError("DecisionTree needs at least one node");
  if (class_count_ < 1) throw ParameterError("DecisionTree: class_count must be >= 1");
  for (const auto& n : nodes_) {
    if (const auto* inner = std::get_if<InnerNode>(&n)) {
      if (inner->left >= nodes_.size() || inner->right >= nodes_.size())
        throw ParameterError("DecisionTree: child index out of range");
    } else if (std::get<LeafNode>(n).class_counts.size() != static_cast<std::size_t>(class_count_)) {
      throw ParameterError("DecisionTree: leaf count vector has the wrong length");
    }
  }
}

DecisionTree DecisionTree::leaf(std::vector<double> class_counts, MissingPolicy missing_policy) {
  const int k = static_cast<int>(class_counts.size());
  return DecisionTree({LeafNode{std::move(class_counts)}}, k, missing_policy);
}

int DecisionTree::depth() const {
  auto rec = [this](auto&& self, std::size_t i) -> int {
    if (const auto* inner = std::get_if<InnerNode>(&nodes_[i]))
      return 1 + std::max(self(self, inner->left), self(self, inner->right));
    return 0;
  };
  return rec(rec, 0);
}

void DecisionTree::accumulate(std::size_t index, std::span<const std::optional<double>> instance,
                              double weight, std::vector<double>& out) const {
  const TreeNode& n = nodes_[index];
  if (const auto* leaf = std::get_if<LeafNode>(&n)) {
    double total = 0.0;
    for (double c : leaf->class_counts) total += c;
    const double denom = total + static_cast<double>(class_count_);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += weight * (leaf->class_counts[c] + 1.0) / denom;
    return;
  }
  const auto& inner = std::get<InnerNode>(n);
  const auto& v = inner.feature < instance.size() ? instance[inner.feature] : std::optional<double>{};
  if (v) {
    accumulate(*v <= inner.threshold ? inner.left : inner.right, instance, weight, out);
    return;
  }
  if (missing_policy_ == MissingPolicy::MajorityBranch) {
    accumulate(inner.left_mass >= inner.right_mass ? inner.left : inner.right, instance, weight, out);
    return;
  }
  const double mass = inner.left_mass + inner.right_mass;
  accumulate(inner.left, instance, weight * inner.left_mass / mass, out);
  accumulate(inner.right, instance, weight * inner.right_mass / mass, out);
}

std::vector<double> DecisionTree::predict_scores(std::span<const std::optional<double>> instance) const {
  std::vector<double> out(static_cast<std::size_t>(class_count_), 0.0);
  accumulate(0, instance, 1.0, out);
  double total = 0.0;
  for (double p : out) total += p;
  for (double& p : out) p /= total;
  return out;
}

std::vector<double> DecisionTree::predict_scores(std::span<const double> instance) const {
  PartialValues values(instance.begin(), instance.end());
  return predict_scores(std::span<const std::optional<double>>(values));
}

std::string DecisionTree::to_text(const std::vector<FeatureSpec>& features) const {
  std::string out;
  auto rec = [&](auto&& self, std::size_t i, int indent) -> void {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (const auto* inner = std::get_if<InnerNode>(&nodes_[i])) {
      const std::string name =
          inner->feature < features.size() ? features[inner->feature].name : fmt::format("f{}", inner->feature);
      out += fmt::format("{}{} <= {} (mass {} | {})\n", pad, name, inner->threshold, inner->left_mass,
                         inner->right_mass);
      self(self, inner->left, indent + 1);
      self(self, inner->right, indent + 1);
    } else {
      out += fmt::format("{}leaf [{}]\n", pad, fmt::join(std::get<LeafNode>(nodes_[i]).class_counts, ", "));
    }
  };
  rec(rec, 0, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Induction

namespace {

struct WeightedItem {
  std::size_t index;
  double weight;
};

// Items reaching a node plus, per feature, the node-local positions of the
// items that have a value for it, in ascending value order.
struct NodeData {
  std::vector<WeightedItem> items;
  std::vector<std::vector<std::uint32_t>> sorted;
};

class Inducer {
 public:
  Inducer(std::span<const Instance> train, const CostVector& costs, int class_count, const TreeParams& params)
      : train_(train), class_count_(class_count), params_(params) {
    cost_divisor_.reserve(costs.size());
    for (Cost c : costs) cost_divisor_.push_back(std::pow(c.to_double(), params.cost_exponent));
    labels_.reserve(train.size());
    for (const auto& x : train) labels_.push_back(*x.label);
  }

  DecisionTree run() {
    NodeData root;
    root.items.reserve(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) root.items.push_back({i, 1.0});
    root.sorted.resize(cost_divisor_.size());
    for (FeatureId f = 0; f < cost_divisor_.size(); ++f) {
      auto& order = root.sorted[f];
      for (std::size_t i = 0; i < train_.size(); ++i)
        if (train_[i].values[f]) order.push_back(static_cast<std::uint32_t>(i));
      std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        return *train_[x].values[f] < *train_[y].values[f];
      });
    }
    build(root, 0);
    return DecisionTree(std::move(nodes_), class_count_, params_.missing_policy);
  }

 private:
  std::size_t build(NodeData& node, int depth) {
    const std::size_t self = nodes_.size();
    nodes_.emplace_back(LeafNode{});

    std::vector<double> counts(static_cast<std::size_t>(class_count_), 0.0);
    double total = 0.0;
    for (const auto& it : node.items) {
      if (!(it.weight > 0.0)) continue;
      counts[static_cast<std::size_t>(labels_[it.index])] += it.weight;
      total += it.weight;
    }
    const auto nonzero = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });

    std::optional<std::pair<FeatureId, SplitResult>> chosen;
    if (depth < params_.max_depth && total >= 2.0 * params_.min_leaf && nonzero > 1)
      chosen = choose_split(node, total);
    if (!chosen) {
      nodes_[self] = LeafNode{std::move(counts)};
      return self;
    }

    const auto [feature, split] = *chosen;
    double left_mass = 0.0, right_mass = 0.0;
    for (const auto& it : node.items) {
      const auto& v = train_[it.index].values[feature];
      if (!v || !(it.weight > 0.0)) continue;
      (*v <= split.threshold ? left_mass : right_mass) += it.weight;
    }
    const double left_share = left_mass / (left_mass + right_mass);

    constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
    NodeData left, right;
    std::vector<std::uint32_t> to_left(node.items.size(), kNone), to_right(node.items.size(), kNone);
    auto send = [](NodeData& child, std::vector<std::uint32_t>& map, std::size_t pos, WeightedItem item) {
      map[pos] = static_cast<std::uint32_t>(child.items.size());
      child.items.push_back(item);
    };
    for (std::size_t pos = 0; pos < node.items.size(); ++pos) {
      const auto& it = node.items[pos];
      if (!(it.weight > 0.0)) continue;
      const auto& v = train_[it.index].values[feature];
      if (v) {
        if (*v <= split.threshold)
          send(left, to_left, pos, it);
        else
          send(right, to_right, pos, it);
      } else if (params_.missing_policy == MissingPolicy::MajorityBranch) {
        if (left_mass >= right_mass)
          send(left, to_left, pos, it);
        else
          send(right, to_right, pos, it);
      } else {
        send(left, to_left, pos, {it.index, it.weight * left_share});
        send(right, to_right, pos, {it.index, it.weight * (1.0 - left_share)});
      }
    }
    left.sorted.resize(node.sorted.size());
    right.sorted.resize(node.sorted.size());
    for (FeatureId f = 0; f < node.sorted.size(); ++f) {
      for (std::uint32_t pos : node.sorted[f]) {
        if (to_left[pos] != kNone) left.sorted[f].push_back(to_left[pos]);
        if (to_right[pos] != kNone) right.sorted[f].push_back(to_right[pos]);
      }
    }
    node = NodeData{};
    to_left = {};
    to_right = {};

    const std::size_t l = build(left, depth + 1);
    const std::size_t r = build(right, depth + 1);
    nodes_[self] = InnerNode{feature, split.threshold, l, r, left_mass, right_mass};
    return self;
  }

  std::optional<std::pair<FeatureId, SplitResult>> choose_split(const NodeData& node, double total) {
    std::optional<std::pair<FeatureId, SplitResult>> best;
    double best_score = 0.0;
    for (FeatureId f = 0; f < cost_divisor_.size(); ++f) {
      present_.clear();
      for (std::uint32_t pos : node.sorted[f]) {
        const auto& it = node.items[pos];
        present_.push_back({*train_[it.index].values[f], labels_[it.index], it.weight});
      }
      if (present_.size() < 2) continue;
      const SplitResult split = detail::scan_sorted(present_, total, class_count_, params_.min_leaf);
      if (!(split.gain > kMinGain)) continue;
      const double score = split.gain / cost_divisor_[f];
      if (!best || score > best_score) {
        best = {f, split};
        best_score = score;
      }
    }
    return best;
  }

  static constexpr double kMinGain = 1e-12;

  std::span<const Instance> train_;
  int class_count_;
  TreeParams params_;
  std::vector<double> cost_divisor_;
  std::vector<ClassId> labels_;
  std::vector<TreeNode> nodes_;
  std::vector<detail::WeightedValue> present_;
};

}  // namespace

DecisionTree induce(std::span<const Instance> train, const CostVector& costs, int class_count,
                    const TreeParams& params) {
  params.validate();
  if (train.empty()) throw ParameterError("induce: empty training set");
  if (class_count < 1) throw ParameterError("induce: class_count must be >= 1");
  for (const auto& x : train) {
    if (!x.label) throw ParameterError("induce: training instance without a label");
    if (*x.label < 0 || *x.label >= class_count) throw ParameterError("induce: label out of range");
    if (x.values.size() != costs.size()) throw ParameterError("induce: instance width differs from cost vector");
  }
  return Inducer(train, costs, class_count, params).run();
}

std::vector<std::vector<double>> predict_rows_serial(const DecisionTree& tree, const Dataset& dataset,
                                                     std::span<const std::size_t> rows) {
  std::vector<std::vector<double>> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = tree.predict_scores(std::span<const double>(dataset.row(rows[i])));
  return out;
}

std::vector<std::vector<double>> predict_rows(const DecisionTree& tree, const Dataset& dataset,
                                              std::span<const std::size_t> rows) {
  std::vector<std::vector<double>> out(rows.size());
  const auto count = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = tree.predict_scores(std::span<const double>(dataset.row(rows[u])));
  }
  return out;
}

}  // namespace budget_stream
