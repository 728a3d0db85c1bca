#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaptista/cli/config.hpp"

namespace adaptista::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunOutput {
  std::vector<std::string> artifacts;  ///< file names relative to the run dir
  nlohmann::json summary = nlohmann::json::object();
};

// Writes artifacts into run_dir as it goes, so a failure leaves what was
// already produced.
RunOutput run_experiment(const ExperimentConfig& config, const std::filesystem::path& run_dir,
                         std::ostream& log);

// Default run directory: $ADAPTISTA_OUTPUT_ROOT (or ./runs) /
// <experiment>-<hash of the resolved config>.
std::filesystem::path default_run_dir(const ExperimentConfig& config);

// Runs, writes config.json, summary.json and manifest.json, and maps
// failures to exit codes.
int execute(const ExperimentConfig& config, const std::filesystem::path& run_dir,
            std::ostream& log, std::ostream& err);

int report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

std::string library_version();

}  // namespace adaptista::cli
