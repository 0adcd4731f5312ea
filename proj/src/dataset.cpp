#include "budget_stream/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string_view>
#include <tuple>

#include "budget_stream/error.hpp"
#include "budget_stream/rng.hpp"

namespace budget_stream {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Comma-separated fields; a field may be wrapped in double quotes.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

bool read_record(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> values;
  std::vector<ClassId> labels;
  std::vector<std::string> class_names;
};

RawTable read_raw_table(std::istream& in) {
  RawTable table;
  std::string line;
  if (!read_record(in, line)) throw SchemaError("data file is empty");
  table.header = split_csv_line(line);
  if (table.header.size() < 2) throw SchemaError("data file needs at least one feature and a label");
  const std::size_t n = table.header.size() - 1;
  {
    std::set<std::string> seen;
    for (std::size_t c = 0; c < n; ++c) {
      if (table.header[c].empty()) throw SchemaError(fmt::format("feature column {} has no name", c + 1));
      if (!seen.insert(table.header[c]).second)
        throw SchemaError("duplicate feature name '" + table.header[c] + "'");
    }
  }

  std::map<std::string, ClassId> label_ids;
  std::size_t row_number = 1;
  while (read_record(in, line)) {
    ++row_number;
    auto fields = split_csv_line(line);
    if (fields.size() != n + 1)
      throw ParseError(fmt::format("expected {} cells, found {}", n + 1, fields.size()), row_number,
                       fields.size());
    std::vector<double> row(n);
    for (std::size_t c = 0; c < n; ++c) {
      auto v = parse_real(fields[c]);
      if (!v) throw ParseError("non-numeric feature value '" + fields[c] + "'", row_number, c + 1);
      row[c] = *v;
    }
    const std::string& label = fields[n];
    if (label.empty()) throw ParseError("missing label", row_number, n + 1);
    auto [it, inserted] = label_ids.try_emplace(label, static_cast<ClassId>(table.class_names.size()));
    if (inserted) table.class_names.push_back(label);
    table.values.push_back(std::move(row));
    table.labels.push_back(it->second);
  }
  if (table.class_names.size() < 2)
    throw SchemaError(fmt::format("need at least 2 distinct labels, found {}", table.class_names.size()));
  return table;
}

std::map<std::string, Cost> read_cost_map(std::istream& in) {
  std::map<std::string, Cost> costs;
  std::string line;
  if (!read_record(in, line)) throw SchemaError("costs file is empty");
  std::size_t row_number = 1;
  while (read_record(in, line)) {
    ++row_number;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) throw ParseError("costs rows must be `feature,cost`", row_number, fields.size());
    Cost cost;
    try {
      cost = Cost::parse(fields[1]);
    } catch (const ParameterError&) {
      throw ParseError("non-numeric cost '" + fields[1] + "'", row_number, 2);
    }
    if (cost <= Cost{}) throw SchemaError("cost of feature '" + fields[0] + "' must be positive");
    if (!costs.emplace(fields[0], cost).second)
      throw SchemaError("duplicate cost entry for '" + fields[0] + "'");
  }
  return costs;
}

Dataset assemble(RawTable table, const std::vector<Cost>& costs) {
  std::vector<FeatureSpec> features;
  for (std::size_t f = 0; f < costs.size(); ++f) features.push_back({f, table.header[f], costs[f]});
  return Dataset(std::move(features), std::move(table.values), std::move(table.labels),
                 std::move(table.class_names));
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Dataset::Dataset(std::vector<FeatureSpec> features, std::vector<std::vector<double>> values,
                 std::vector<ClassId> labels, std::vector<std::string> class_names)
    : features_(std::move(features)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (features_.empty()) throw SchemaError("dataset has no features");
  std::set<std::string> names;
  for (std::size_t f = 0; f < features_.size(); ++f) {
    if (features_[f].id != f) throw SchemaError("feature ids must be dense 0..n-1");
    if (features_[f].cost <= Cost{})
      throw SchemaError("cost of feature '" + features_[f].name + "' must be positive");
    if (!names.insert(features_[f].name).second)
      throw SchemaError("duplicate feature name '" + features_[f].name + "'");
  }
  if (class_names_.size() < 2) throw SchemaError("dataset needs at least 2 classes");
  if (values_.size() != labels_.size()) throw SchemaError("row and label counts differ");
  for (std::size_t r = 0; r < values_.size(); ++r) {
    if (values_[r].size() != features_.size())
      throw SchemaError(fmt::format("row {} has {} values, expected {}", r, values_[r].size(),
                                    features_.size()));
    if (labels_[r] < 0 || labels_[r] >= class_count())
      throw SchemaError(fmt::format("row {} has label {} outside 0..{}", r, labels_[r], class_count() - 1));
  }
}

CostVector Dataset::costs() const {
  CostVector out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.cost);
  return out;
}

Dataset read_dataset(std::istream& data, std::istream& costs_in) {
  RawTable table = read_raw_table(data);
  const auto cost_map = read_cost_map(costs_in);
  const std::size_t n = table.header.size() - 1;
  std::vector<Cost> costs;
  for (std::size_t f = 0; f < n; ++f) {
    auto it = cost_map.find(table.header[f]);
    if (it == cost_map.end()) throw SchemaError("no cost given for feature '" + table.header[f] + "'");
    costs.push_back(it->second);
  }
  return assemble(std::move(table), costs);
}

Dataset load_dataset(const std::filesystem::path& data_path, const std::filesystem::path& costs_path) {
  auto data = open_input(data_path);
  auto costs = open_input(costs_path);
  return read_dataset(data, costs);
}

Dataset read_dataset_random_costs(std::istream& data, double low, double high, std::uint64_t seed) {
  if (!(low > 0.0) || !(high >= low)) throw ParameterError("random cost range must satisfy 0 < low <= high");
  RawTable table = read_raw_table(data);
  Rng rng(mix64(seed ^ hash_string("costs")));
  std::vector<Cost> costs;
  for (std::size_t f = 0; f + 1 < table.header.size(); ++f) {
    const double c = std::round(rng.uniform(low, high) * 100.0) / 100.0;
    costs.push_back(Cost::from_double(std::max(c, 0.01)));
  }
  return assemble(std::move(table), costs);
}

Dataset load_dataset_random_costs(const std::filesystem::path& data_path, double low, double high,
                                  std::uint64_t seed) {
  auto data = open_input(data_path);
  return read_dataset_random_costs(data, low, high, seed);
}

void write_dataset(const Dataset& dataset, std::ostream& data, std::ostream& costs) {
  for (const auto& f : dataset.features()) data << f.name << ',';
  data << "label\n";
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    for (double v : dataset.row(r)) data << fmt::format("{}", v) << ',';
    data << dataset.class_names()[static_cast<std::size_t>(dataset.label(r))] << '\n';
  }
  costs << "feature,cost\n";
  for (const auto& f : dataset.features()) costs << f.name << ',' << f.cost.to_string() << '\n';
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& data_path,
                  const std::filesystem::path& costs_path) {
  std::ofstream data(data_path);
  std::ofstream costs(costs_path);
  if (!data || !costs) throw SchemaError("cannot write dataset files");
  write_dataset(dataset, data, costs);
}

PartialTable read_partial_table(std::istream& in) {
  PartialTable table;
  std::string line;
  if (!read_record(in, line)) throw SchemaError("data file is empty");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw SchemaError("data file needs at least one feature and a label");
  table.feature_names.assign(header.begin(), header.end() - 1);
  const std::size_t n = table.feature_names.size();
  std::size_t row_number = 1;
  while (read_record(in, line)) {
    ++row_number;
    auto fields = split_csv_line(line);
    if (fields.size() != n + 1)
      throw ParseError(fmt::format("expected {} cells, found {}", n + 1, fields.size()), row_number,
                       fields.size());
    std::vector<std::optional<double>> row(n);
    for (std::size_t c = 0; c < n; ++c) {
      if (fields[c].empty()) continue;
      row[c] = parse_real(fields[c]);
      if (!row[c]) throw ParseError("non-numeric feature value '" + fields[c] + "'", row_number, c + 1);
    }
    table.values.push_back(std::move(row));
    table.labels.push_back(fields[n]);
  }
  return table;
}

StreamSplit split_stream(const Dataset& dataset, std::uint64_t seed) {
  const std::size_t rows = dataset.row_count();
  if (rows < 10) throw ParameterError(fmt::format("need at least 10 rows to split, have {}", rows));
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix64(seed));
  rng.shuffle(std::span<std::size_t>(order));
  // round(0.7 * rows) in integers: (7 * rows + 5) / 10.
  const std::size_t stream_size = (7 * rows + 5) / 10;
  StreamSplit split;
  split.seed = seed;
  split.stream.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(stream_size));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(stream_size), order.end());
  return split;
}

std::optional<CostProfile> parse_cost_profile(std::string_view name) {
  if (name == "informative-cheap") return CostProfile::InformativeCheap;
  if (name == "informative-expensive") return CostProfile::InformativeExpensive;
  if (name == "uniform") return CostProfile::Uniform;
  return std::nullopt;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_informative < 1) throw ParameterError("n_informative must be >= 1");
  if (spec.n_instances < 2) throw ParameterError("n_instances must be >= 2");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 0.05))
    throw ParameterError("label_noise must lie in [0, 0.05]");
  if (!(spec.informative_spread >= 0.0) || !std::isfinite(spec.informative_spread))
    throw ParameterError("informative_spread must be >= 0");
  if (!(spec.cheap_low >= 0.01 && spec.cheap_high >= spec.cheap_low && std::isfinite(spec.cheap_high)))
    throw ParameterError("cheap cost range must satisfy 0.01 <= low <= high");
  if (!(spec.expensive_low >= 0.01 && spec.expensive_high >= spec.expensive_low && std::isfinite(spec.expensive_high)))
    throw ParameterError("expensive cost range must satisfy 0.01 <= low <= high");

  const std::size_t n = spec.n_informative + spec.n_noise;
  Rng rng(mix64(spec.seed ^ hash_string("synthetic")));

  // Column position -> source feature; sources [0, n_informative) are informative.
  std::vector<std::size_t> source(n);
  std::iota(source.begin(), source.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(source));

  std::vector<FeatureSpec> features(n);
  for (std::size_t col = 0; col < n; ++col) {
    const bool informative = source[col] < spec.n_informative;
    double lo = 0.0, hi = 0.0;
    if (spec.cost_profile == CostProfile::InformativeCheap) {
      std::tie(lo, hi) = informative ? std::pair{spec.cheap_low, spec.cheap_high}
                                     : std::pair{spec.expensive_low, spec.expensive_high};
    } else if (spec.cost_profile == CostProfile::InformativeExpensive) {
      std::tie(lo, hi) = informative ? std::pair{spec.expensive_low, spec.expensive_high}
                                     : std::pair{spec.cheap_low, spec.cheap_high};
    } else {
      std::tie(lo, hi) = std::pair{spec.cheap_low, spec.expensive_high};
    }
    const double cost = std::round(rng.uniform(lo, hi) * 100.0) / 100.0;
    const std::string name = informative ? fmt::format("inf_{}", source[col])
                                         : fmt::format("noise_{}", source[col] - spec.n_informative);
    features[col] = {col, name, Cost::from_double(cost)};
  }

  std::vector<std::vector<double>> values(spec.n_instances, std::vector<double>(n));
  std::vector<ClassId> labels(spec.n_instances);
  std::vector<double> draw(n);
  for (std::size_t r = 0; r < spec.n_instances; ++r) {
    const double latent = rng.normal();
    double informative_sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (s < spec.n_informative) {
        draw[s] = latent + spec.informative_spread * rng.normal();
        informative_sum += draw[s];
      } else {
        draw[s] = rng.normal();
      }
    }
    for (std::size_t col = 0; col < n; ++col) values[r][col] = draw[source[col]];
    ClassId y = informative_sum > 0.0 ? 1 : 0;
    if (rng.uniform() < spec.label_noise) y = 1 - y;
    labels[r] = y;
  }
  // Class ids follow first appearance, as the CSV loader assigns them.
  std::vector<std::string> class_names{"0", "1"};
  if (!labels.empty() && labels.front() == 1) {
    for (auto& y : labels) y = 1 - y;
    std::swap(class_names[0], class_names[1]);
  }
  return Dataset(std::move(features), std::move(values), std::move(labels), std::move(class_names));
}

}  // namespace budget_stream
