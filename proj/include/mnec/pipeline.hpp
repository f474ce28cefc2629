#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mnec/econometrics.hpp"
#include "mnec/panel.hpp"

namespace mnec {

inline constexpr const char* kVersion = "0.3.0";

struct RunConfig {
  std::filesystem::path flows;
  std::filesystem::path panel;
  std::optional<std::filesystem::path> crosswalk;  // flows already in the panel's scheme when absent
  std::filesystem::path output = "out";
  std::vector<PeriodSpec> periods = default_periods();
  int threshold = 5;
  int steps = 2;
  bool cluster_by_region = false;
  bool industry_fe = true;
  bool region_fe = true;
  std::vector<Family> families{Family::Wc, Family::Sc, Family::Combined};
  std::optional<int> network_year;  // year for node MNE shares; first base year by default
};

/// Reads `key = value` lines ('#' starts a comment). Relative paths are
/// resolved against the config file's directory. `period` may repeat; the
/// first occurrence replaces the defaults.
RunConfig load_config(const std::filesystem::path& path);

/// Applies one key/value pair; throws Error(Validation) for unknown keys.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Exit status for an error class: 1 estimation, 2 validation, 3 I/O.
int exit_code(ErrorKind kind);

// Subcommands. Each writes under config.output, returns the files written,
// and throws Error tagged with the failing stage.
std::vector<std::filesystem::path> run_build_network(const RunConfig& config, std::ostream& log);
std::vector<std::filesystem::path> run_presence(const RunConfig& config, std::ostream& log);
std::vector<std::filesystem::path> run_cohesion(const RunConfig& config, std::ostream& log);
std::vector<std::filesystem::path> run_regress(const RunConfig& config, std::ostream& log);
std::vector<std::filesystem::path> run_describe(const RunConfig& config, std::ostream& log);
/// Full chain plus manifest.json recording config, input and output digests.
std::vector<std::filesystem::path> run_pipeline(const RunConfig& config, std::ostream& log);

}  // namespace mnec
