#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <adaptista/training.hpp>

namespace adaptista::cli {

// Thrown for anything wrong with a config; field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"solve",          "oista-vs-ista",   "mp-law",
                                            "train",          "steps-figure",    "coupling-figure",
                                            "depth-comparison", "bench"};
  return ids;
}

struct ExperimentConfig {
  std::string experiment;
  Index n = 10;
  Index m = 50;
  std::vector<double> lams;
  std::uint64_t seed = 0;
  int iterations = 300;   ///< solve/bench: n_iter; oista-vs-ista: budget
  int repetitions = 10;
  double gap = 1e-13;
  std::vector<std::string> solvers{"ista", "fista", "oista"};
  std::vector<double> zetas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int depth = 20;
  std::vector<int> depths{0, 1, 2, 5, 10, 20};
  std::vector<Variant> variants{Variant::slista};
  Index n_train = 1000;
  Index n_test = 1000;
  TrainConfig training;
  std::optional<std::filesystem::path> dictionary;

  double lam() const { return lams.front(); }
};

// Parses and validates. base_dir resolves relative dictionary paths.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path);

// Full resolved config; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace adaptista::cli
