#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "claimsim/harness.hpp"

namespace claimsim {

std::string tool_version();

enum class Command { Simulate, Analyze, Verify };

struct RunOptions {
  Command command = Command::Verify;
  std::string config_path;
  std::filesystem::path out_dir = "out";
  /// When set, must match the config's regime.
  std::optional<Regime> regime;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  /// Failed checks are failures even outside the hypotheses.
  bool strict = false;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  ExperimentConfig config;
  std::filesystem::path out_dir;
  std::string tool_version;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
  int exit_status = 0;
};

nlohmann::ordered_json to_json(const RunManifest& m);

/// Closed-form quantities for a model, with per-section error reports.
nlohmann::ordered_json analyze(const ExperimentConfig& config);

/// Loads the config, executes the command and writes the outputs, the
/// manifest last. Module errors become error.json plus a nonzero status.
/// Returns 0 when every binding check passed, 1 when one failed, 2 on error.
int run(const RunOptions& options, std::ostream& log);

/// Same, for an already resolved config.
int run(RunManifest& manifest, Command command, bool strict, std::ostream& log);

}  // namespace claimsim
