#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "budget_stream/dataset.hpp"
#include "budget_stream/harness.hpp"

namespace budget_stream {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Malformed sweep configuration; key() names the offending JSON key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Where a sweep's data comes from.
struct DatasetSource {
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> costs;
  std::optional<std::pair<double, double>> random_cost_range;
  std::uint64_t random_cost_seed = 0;
  std::optional<SyntheticSpec> synthetic;

  Dataset load() const;
};

struct RunManifest {
  std::string command;
  std::filesystem::path config_path;
  DatasetSource source;
  SweepConfig config;
  std::filesystem::path output_dir;
};

/// Parses a sweep config document. Relative paths are resolved against
/// base_dir. Throws ConfigError.
RunManifest parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir);

/// Entry point of `budget-stream`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace budget_stream
