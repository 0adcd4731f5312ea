#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "budget_stream/cost.hpp"

namespace budget_stream {

using FeatureId = std::size_t;
using ClassId = int;

struct FeatureSpec {
  FeatureId id = 0;
  std::string name;
  Cost cost;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Complete, immutable table: every row carries all n feature values.
class Dataset {
 public:
  Dataset(std::vector<FeatureSpec> features, std::vector<std::vector<double>> values,
          std::vector<ClassId> labels, std::vector<std::string> class_names);

  std::size_t feature_count() const { return features_.size(); }
  std::size_t row_count() const { return labels_.size(); }
  int class_count() const { return static_cast<int>(class_names_.size()); }

  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::vector<double>& row(std::size_t r) const { return values_[r]; }
  double value(std::size_t r, FeatureId f) const { return values_[r][f]; }
  ClassId label(std::size_t r) const { return labels_[r]; }
  const std::vector<ClassId>& labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  CostVector costs() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<FeatureSpec> features_;
  std::vector<std::vector<double>> values_;
  std::vector<ClassId> labels_;
  std::vector<std::string> class_names_;
};

/// Row indices of the shuffled stream (arrival order) and the held-out test set.
struct StreamSplit {
  std::vector<std::size_t> stream;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

// Loading. Data CSV: header row, last column is the label. Costs CSV: header
// row then `feature,cost` pairs.

Dataset load_dataset(const std::filesystem::path& data_path,
                     const std::filesystem::path& costs_path);
Dataset read_dataset(std::istream& data, std::istream& costs);

/// For datasets without known costs: each cost uniform in [low, high],
/// rounded to 0.01 units.
Dataset load_dataset_random_costs(const std::filesystem::path& data_path, double low,
                                  double high, std::uint64_t seed);
Dataset read_dataset_random_costs(std::istream& data, double low, double high,
                                  std::uint64_t seed);

void write_dataset(const Dataset& dataset, std::ostream& data, std::ostream& costs);
void save_dataset(const Dataset& dataset, const std::filesystem::path& data_path,
                  const std::filesystem::path& costs_path);

/// A table that may contain empty cells, e.g. an acquired training set.
struct PartialTable {
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::string> labels;
};
PartialTable read_partial_table(std::istream& data);

/// 70/30 split; deterministic in (row count, seed). Requires >= 10 rows.
StreamSplit split_stream(const Dataset& dataset, std::uint64_t seed);

enum class CostProfile { InformativeCheap, InformativeExpensive, Uniform };

struct SyntheticSpec {
  std::size_t n_instances = 1000;
  std::size_t n_informative = 2;
  std::size_t n_noise = 18;
  CostProfile cost_profile = CostProfile::InformativeCheap;
  std::uint64_t seed = 1;
  double label_noise = 0.03;
  /// Scale of the per-feature noise added to the shared latent factor.
  double informative_spread = 0.5;
  /// Cost ranges used by the cheap and expensive groups of a profile.
  double cheap_low = 1.0, cheap_high = 2.0;
  double expensive_low = 10.0, expensive_high = 20.0;
};

/// Binary task: a latent N(0,1) factor u drives every informative feature
/// (u + informative_spread * e_j) and the label is [mean of informative features > 0] with
/// `label_noise` flips. Noise features are independent N(0,1). Column order
/// is shuffled by the seed.
Dataset generate_synthetic(const SyntheticSpec& spec);

std::optional<CostProfile> parse_cost_profile(std::string_view name);

}  // namespace budget_stream
