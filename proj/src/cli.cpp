#include "budget_stream/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "budget_stream/engine.hpp"
#include "budget_stream/error.hpp"
#include "budget_stream/report.hpp"

namespace budget_stream {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("wrong type: ") + e.what());
  }
}

const json& require_object(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

TreeParams parse_tree(const json& obj) {
  reject_unknown_keys(obj, "tree.", {"max_depth", "min_leaf", "cost_exponent", "missing_policy"});
  TreeParams t;
  if (obj.contains("max_depth")) t.max_depth = get_as<int>(obj, "max_depth", "tree.max_depth");
  if (obj.contains("min_leaf")) t.min_leaf = get_as<double>(obj, "min_leaf", "tree.min_leaf");
  if (obj.contains("cost_exponent")) t.cost_exponent = get_as<double>(obj, "cost_exponent", "tree.cost_exponent");
  if (obj.contains("missing_policy")) {
    auto mp = parse_missing_policy(get_as<std::string>(obj, "missing_policy", "tree.missing_policy"));
    if (!mp) throw ConfigError("tree.missing_policy", "expected 'weighted' or 'majority'");
    t.missing_policy = *mp;
  }
  try {
    t.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("tree", e.what());
  }
  return t;
}

DatasetSource parse_source(const json& obj, const std::filesystem::path& base) {
  reject_unknown_keys(obj, "dataset.", {"data", "costs", "random_costs", "synthetic"});
  DatasetSource src;
  if (obj.contains("synthetic")) {
    if (obj.contains("data")) throw ConfigError("dataset.synthetic", "use either 'data' or 'synthetic'");
    const json& s = require_object(obj, "synthetic", "dataset.synthetic");
    reject_unknown_keys(s, "dataset.synthetic.",
                        {"instances", "informative", "noise", "cost_profile", "seed", "label_noise"});
    SyntheticSpec spec;
    if (s.contains("instances")) spec.n_instances = get_as<std::size_t>(s, "instances", "dataset.synthetic.instances");
    if (s.contains("informative"))
      spec.n_informative = get_as<std::size_t>(s, "informative", "dataset.synthetic.informative");
    if (s.contains("noise")) spec.n_noise = get_as<std::size_t>(s, "noise", "dataset.synthetic.noise");
    if (s.contains("seed")) spec.seed = get_as<std::uint64_t>(s, "seed", "dataset.synthetic.seed");
    if (s.contains("label_noise"))
      spec.label_noise = get_as<double>(s, "label_noise", "dataset.synthetic.label_noise");
    if (s.contains("cost_profile")) {
      auto profile = parse_cost_profile(get_as<std::string>(s, "cost_profile", "dataset.synthetic.cost_profile"));
      if (!profile)
        throw ConfigError("dataset.synthetic.cost_profile",
                          "expected informative-cheap, informative-expensive or uniform");
      spec.cost_profile = *profile;
    }
    if (spec.n_informative < 1) throw ConfigError("dataset.synthetic.informative", "must be >= 1");
    src.synthetic = spec;
    return src;
  }
  if (!obj.contains("data")) throw ConfigError("dataset.data", "missing (or give dataset.synthetic)");
  src.data = resolve(base, get_as<std::string>(obj, "data", "dataset.data"));
  if (obj.contains("costs")) {
    src.costs = resolve(base, get_as<std::string>(obj, "costs", "dataset.costs"));
  } else if (obj.contains("random_costs")) {
    const json& rc = require_object(obj, "random_costs", "dataset.random_costs");
    reject_unknown_keys(rc, "dataset.random_costs.", {"low", "high", "seed"});
    const double low = rc.contains("low") ? get_as<double>(rc, "low", "dataset.random_costs.low") : 1.0;
    const double high = rc.contains("high") ? get_as<double>(rc, "high", "dataset.random_costs.high") : 100.0;
    if (!(low > 0.0 && high >= low)) throw ConfigError("dataset.random_costs", "need 0 < low <= high");
    src.random_cost_range = {low, high};
    if (rc.contains("seed")) src.random_cost_seed = get_as<std::uint64_t>(rc, "seed", "dataset.random_costs.seed");
  } else {
    throw ConfigError("dataset.costs", "missing (or give dataset.random_costs)");
  }
  return src;
}

std::vector<std::string> reversed(std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  return args;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw SchemaError("cannot create output directory '" + dir.string() + "'");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  out << content;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct AcquireArgs {
  std::string data, costs, policy, out;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  PolicyParams params;
  bool rollover = false;
};

int cmd_acquire(const AcquireArgs& a, std::ostream& out) {
  const auto kind = parse_policy_kind(a.policy);
  const Dataset dataset = load_dataset(a.data, a.costs);
  const StreamSplit split = split_stream(dataset, a.seed);

  PolicySetup setup;
  setup.costs = dataset.costs();
  setup.class_count = dataset.class_count();
  setup.seed = policy_seed(a.seed, a.policy, a.alpha);
  setup.params = a.params;
  if (kind == PolicyKind::Oracle) setup.oracle_order = oracle_rank(dataset, split.stream);
  auto policy = make_policy(*kind, setup);

  const Cost budget = sweep_budget(dataset, split.stream.size(), a.alpha);
  EngineOptions options;
  options.rollover_leftover = a.rollover;
  const StreamResult result = run_stream(dataset, split, *policy, budget, options);

  ensure_dir(a.out);
  std::ostringstream training, trace;
  write_training_csv(result.training, dataset, training);
  write_trace_csv(result.trace, dataset.features(), trace);
  write_file(std::filesystem::path(a.out) / "training_set.csv", training.str());
  write_file(std::filesystem::path(a.out) / "trace.csv", trace.str());
  out << fmt::format("{}: {} instances, budget {}, spent {}\n", a.policy, result.training.size(),
                     budget.to_string(), result.total_spent.to_string());
  return kExitOk;
}

struct SweepArgs {
  std::string config, out;
  std::optional<int> runs, threads;
  std::optional<std::uint64_t> seed;
};

RunManifest resolve_manifest(const SweepArgs& a) {
  const std::filesystem::path config_path(a.config);
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const SchemaError& e) {
    throw ConfigError("--config", e.what());
  }
  RunManifest m = parse_sweep_config(text, config_path.parent_path());
  m.config_path = config_path;
  if (a.runs) m.config.runs = *a.runs;
  if (a.threads) m.config.threads = *a.threads;
  if (a.seed) m.config.base_seed = *a.seed;
  if (!a.out.empty()) m.output_dir = a.out;
  if (m.output_dir.empty()) throw ConfigError("output", "no output directory (set 'output' or pass --out)");
  try {
    m.config.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("config", e.what());
  }
  return m;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const RunManifest m = resolve_manifest(a);
  const Dataset dataset = m.source.load();
  const SweepResult result = sweep(dataset, m.config);
  ensure_dir(m.output_dir);
  std::ostringstream rows, aggs;
  write_results_csv(result, rows);
  write_aggregate_csv(result, aggs);
  write_file(m.output_dir / "results.csv", rows.str());
  write_file(m.output_dir / "aggregate.csv", aggs.str());
  out << fmt::format("{} rows, {} aggregates written to {}\n", result.rows.size(), result.aggregates.size(),
                     m.output_dir.string());
  return kExitOk;
}

int cmd_report(const std::string& results, const std::string& image, std::ostream& out) {
  std::ifstream in(results);
  if (!in) throw SchemaError("cannot read '" + results + "'");
  const auto aggregates = read_aggregate_csv(in);
  const std::filesystem::path image_path(image);
  if (image_path.has_parent_path()) ensure_dir(image_path.parent_path());
  write_file(image_path, render_svg(aggregates));
  std::filesystem::path md_path = image_path;
  md_path.replace_extension(".md");
  write_file(md_path, render_markdown(aggregates));
  out << fmt::format("wrote {} and {}\n", image_path.string(), md_path.string());
  return kExitOk;
}

}  // namespace

Dataset DatasetSource::load() const {
  if (synthetic) return generate_synthetic(*synthetic);
  if (!data) throw SchemaError("no dataset configured");
  if (costs) return load_dataset(*data, *costs);
  if (random_cost_range) return load_dataset_random_costs(*data, random_cost_range->first, random_cost_range->second, random_cost_seed);
  throw SchemaError("no costs configured");
}

RunManifest parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");
  reject_unknown_keys(doc, "", {"dataset", "policies", "alphas", "runs", "base_seed", "include_complete", "threads",
                                "output", "warmup_fraction", "variance_floor", "rebuild_interval", "tree"});

  RunManifest m;
  m.command = "sweep";
  if (!doc.contains("dataset")) throw ConfigError("dataset", "missing");
  m.source = parse_source(require_object(doc, "dataset", "dataset"), base_dir);

  SweepConfig& c = m.config;
  if (doc.contains("policies")) {
    const auto names = get_as<std::vector<std::string>>(doc, "policies", "policies");
    c.policies.clear();
    for (const auto& n : names) {
      auto kind = parse_policy_kind(n);
      if (!kind) throw ConfigError("policies", "unknown policy '" + n + "'");
      c.policies.push_back(*kind);
    }
  }
  if (doc.contains("alphas")) c.alphas = get_as<std::vector<double>>(doc, "alphas", "alphas");
  if (doc.contains("runs")) c.runs = get_as<int>(doc, "runs", "runs");
  if (doc.contains("base_seed")) {
    c.base_seed = get_as<std::uint64_t>(doc, "base_seed", "base_seed");
  } else if (const char* env = std::getenv("BUDGET_STREAM_SEED")) {
    try {
      c.base_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("BUDGET_STREAM_SEED", "not an unsigned integer");
    }
  }
  if (doc.contains("include_complete")) c.include_complete = get_as<bool>(doc, "include_complete", "include_complete");
  if (doc.contains("threads")) c.threads = get_as<int>(doc, "threads", "threads");
  if (doc.contains("output")) m.output_dir = resolve(base_dir, get_as<std::string>(doc, "output", "output"));
  if (doc.contains("warmup_fraction"))
    c.policy_params.warmup_fraction = get_as<double>(doc, "warmup_fraction", "warmup_fraction");
  if (doc.contains("variance_floor"))
    c.policy_params.variance_floor = get_as<double>(doc, "variance_floor", "variance_floor");
  if (doc.contains("rebuild_interval"))
    c.policy_params.rebuild_interval = get_as<int>(doc, "rebuild_interval", "rebuild_interval");
  if (doc.contains("tree")) {
    c.eval_tree = parse_tree(require_object(doc, "tree", "tree"));
    c.policy_params.tree = c.eval_tree;
  }

  auto check = [](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const ParameterError& e) {
      throw ConfigError(key, e.what());
    }
  };
  if (c.alphas.empty()) throw ConfigError("alphas", "must not be empty");
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    if (!(c.alphas[i] > 0.0 && c.alphas[i] <= 1.0)) throw ConfigError("alphas", "values must lie in (0, 1]");
    if (i > 0 && !(c.alphas[i] > c.alphas[i - 1])) throw ConfigError("alphas", "must be strictly increasing");
  }
  if (c.policies.empty() && !c.include_complete) throw ConfigError("policies", "no policies to run");
  if (c.runs < 1) throw ConfigError("runs", "must be >= 1");
  if (c.threads < 0) throw ConfigError("threads", "must be >= 0");
  check("warmup_fraction", [&] {
    if (!(c.policy_params.warmup_fraction > 0.0 && c.policy_params.warmup_fraction < 1.0))
      throw ParameterError("must lie in (0, 1)");
  });
  check("variance_floor", [&] {
    if (!(c.policy_params.variance_floor > 0.0)) throw ParameterError("must be positive");
  });
  check("rebuild_interval", [&] {
    if (c.policy_params.rebuild_interval < 1) throw ParameterError("must be >= 1");
  });
  return m;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online budgeted feature-value acquisition simulator", "budget-stream"};
  app.require_subcommand(1);
  int threads_flag = -1;
  app.add_option("--threads", threads_flag, "Cap on harness threads (sweep)")->check(CLI::NonNegativeNumber);

  AcquireArgs acq;
  auto* acquire = app.add_subcommand("acquire", "Run one acquisition pass and write the training set and trace");
  acquire->add_option("--data", acq.data, "Data CSV (last column is the label)")->required()->check(CLI::ExistingFile);
  acquire->add_option("--costs", acq.costs, "Costs CSV (feature,cost)")->required()->check(CLI::ExistingFile);
  acquire->add_option("--policy", acq.policy, "pure-random | cost-random | variance-cost | tree-based | oracle")
      ->required()
      ->check(CLI::IsMember({"pure-random", "cost-random", "variance-cost", "tree-based", "oracle"}));
  acquire->add_option("--alpha", acq.alpha, "Budget as a fraction of full acquisition")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  acquire->add_option("--seed", acq.seed, "Split and policy seed")->required();
  acquire->add_option("--out", acq.out, "Output directory")->required();
  acquire->add_option("--warmup-fraction", acq.params.warmup_fraction)->check(CLI::Range(0.0, 1.0));
  acquire->add_option("--variance-floor", acq.params.variance_floor)->check(CLI::PositiveNumber);
  acquire->add_option("--rebuild-interval", acq.params.rebuild_interval)->check(CLI::PositiveNumber);
  acquire->add_flag("--rollover", acq.rollover, "Carry unspent instance budget forward");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the policy x budget x run grid");
  sweep_cmd->add_option("--config", sw.config, "Sweep config JSON")->required();
  sweep_cmd->add_option("--out", sw.out, "Output directory (overrides config 'output')");
  sweep_cmd->add_option("--runs", sw.runs, "Override the number of runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sw.seed, "Override base_seed");
  sweep_cmd->add_option("--threads", sw.threads, "Cap on harness threads")->check(CLI::NonNegativeNumber);

  std::string results, image;
  auto* report = app.add_subcommand("report", "Render a budget-vs-AUC chart and markdown table");
  report->add_option("--results", results, "Aggregate CSV from sweep")->required();
  report->add_option("--out", image, "Output SVG path")->required();

  try {
    app.parse(reversed(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  if (threads_flag >= 0 && !sw.threads) sw.threads = threads_flag;

  try {
    if (acquire->parsed()) {
      if (!(acq.params.warmup_fraction > 0.0 && acq.params.warmup_fraction < 1.0)) {
        err << "--warmup-fraction must lie in (0, 1)\n";
        return kExitUsage;
      }
      return cmd_acquire(acq, out);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(sw, out);
    if (report->parsed()) return cmd_report(results, image, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace budget_stream
