#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "adaptista/cli/config.hpp"
#include "adaptista/cli/experiments.hpp"

#ifndef ADAPTISTA_PRESET_DIR
#define ADAPTISTA_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace adaptista;
using namespace adaptista::cli;

namespace {

// A bare name resolves against $ADAPTISTA_PRESET_DIR, then the source tree's
// presets; anything else is a path. A run directory means its config.json.
fs::path resolve_preset(const std::string& arg) {
  fs::path p(arg);
  if (fs::is_directory(p)) return p / "config.json";
  if (fs::exists(p)) return p;
  if (p.has_extension() || p.has_parent_path()) return p;
  const char* dirs[] = {std::getenv("ADAPTISTA_PRESET_DIR"), ADAPTISTA_PRESET_DIR};
  for (const char* dir : dirs) {
    if (!dir || !*dir) continue;
    const fs::path candidate = fs::path(dir) / (arg + ".json");
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-step ISTA solvers and unfolded networks"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  std::string output;
  std::uint64_t seed = 0;
  bool seed_given = false;

  // solve
  auto* solve = app.add_subcommand("solve", "run ISTA/FISTA/OISTA on one generated problem");
  Index n = 10, m = 50;
  double lam = 0.5;
  int iterations = 300;
  std::vector<std::string> solvers;
  std::string dictionary;
  solve->add_option("--n", n, "rows of the dictionary")->capture_default_str();
  solve->add_option("--m", m, "atoms in the dictionary")->capture_default_str();
  solve->add_option("--lam", lam, "regularization")->capture_default_str();
  solve->add_option("--iterations", iterations, "iteration budget")->capture_default_str();
  solve->add_option("--solvers", solvers, "subset of ista fista oista");
  solve->add_option("--dictionary", dictionary, "CSV dictionary instead of a Gaussian one");
  solve->add_option("--seed", seed, "seed")->each([&](const std::string&) { seed_given = true; });
  solve->add_option("-o,--output", output, "run directory");

  // train
  auto* trn = app.add_subcommand("train", "train an unfolded network");
  Index tn = 10, tm = 20, n_train = 1000, n_test = 1000;
  double tlam = 0.2;
  int depth = 20, epochs = 200;
  std::string variant = "SLISTA";
  std::string tdictionary;
  trn->add_option("--n", tn, "rows of the dictionary")->capture_default_str();
  trn->add_option("--m", tm, "atoms in the dictionary")->capture_default_str();
  trn->add_option("--lam", tlam, "regularization, in (0, 1)")->capture_default_str();
  trn->add_option("--depth", depth, "number of layers")->capture_default_str();
  trn->add_option("--variant", variant, "LISTA, SLISTA or ALISTA")->capture_default_str();
  trn->add_option("--epochs", epochs, "maximum epochs")->capture_default_str();
  trn->add_option("--n-train", n_train, "training samples")->capture_default_str();
  trn->add_option("--n-test", n_test, "test samples")->capture_default_str();
  trn->add_option("--dictionary", tdictionary, "CSV dictionary instead of a Gaussian one");
  trn->add_option("--seed", seed, "seed")->each([&](const std::string&) { seed_given = true; });
  trn->add_option("-o,--output", output, "run directory");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a preset or config file");
  std::string preset;
  exp->add_option("preset", preset, "preset name, config path or run directory")->required();
  exp->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });
  exp->add_option("-o,--output", output, "run directory");

  // report
  auto* rep = app.add_subcommand("report", "summarize a run directory");
  std::string run_dir;
  rep->add_option("run-dir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (rep->parsed()) return report(run_dir, std::cout, std::cerr);

  ExperimentConfig config;
  try {
    nlohmann::json doc;
    fs::path base_dir;
    if (solve->parsed()) {
      doc = {{"experiment", "solve"}, {"n", n}, {"m", m}, {"lam", lam}, {"iterations", iterations}};
      if (!solvers.empty()) doc["solvers"] = solvers;
      if (!dictionary.empty()) doc["dictionary"] = dictionary;
    } else if (trn->parsed()) {
      doc = {{"experiment", "train"}, {"n", tn},          {"m", tm},
             {"lam", tlam},           {"depth", depth},   {"variant", variant},
             {"n_train", n_train},    {"n_test", n_test}, {"training", {{"max_epochs", epochs}}}};
      if (!tdictionary.empty()) doc["dictionary"] = tdictionary;
    } else {
      const fs::path path = resolve_preset(preset);
      std::ifstream in(path);
      if (!in) throw ConfigError("<file>", "cannot open preset or config '" + preset + "'");
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<file>", "invalid JSON in " + path.string() + ": " + e.what());
      }
      base_dir = path.parent_path();
    }
    if (seed_given) doc["seed"] = seed;
    config = parse_config(doc, base_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const fs::path dir = output.empty() ? default_run_dir(config) : fs::path(output);
  return execute(config, dir, std::cerr, std::cerr);
}
