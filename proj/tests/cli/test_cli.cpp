#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include <adaptista/csv.hpp>
#include <adaptista/networks.hpp>
#include <adaptista/datagen.hpp>

#include "adaptista/cli/config.hpp"
#include "adaptista/cli/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adaptista;
using namespace adaptista::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "adaptista-cli-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Shell {
  int code;
  std::string output;
};

Shell run_cli(const std::string& args, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() / "adaptista-cli-tests" / "last.log";
  fs::create_directories(log.parent_path());
  const std::string cmd = env + " " + ADAPTISTA_CLI_PATH + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

std::string config_error_field(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST(Config, FieldLevelDiagnostics) {
  EXPECT_EQ(config_error_field({{"experiment", "solve"}}), "lam");
  EXPECT_EQ(config_error_field({{"lam", 0.5}}), "experiment");
  EXPECT_EQ(config_error_field({{"experiment", "plot"}, {"lam", 0.5}}), "experiment");
  EXPECT_EQ(config_error_field({{"experiment", "solve"}, {"lam", 0.5}, {"lamda", 1}}), "lamda");
  EXPECT_EQ(config_error_field({{"experiment", "solve"}, {"lam", -1.0}}), "lam");
  EXPECT_EQ(config_error_field({{"experiment", "solve"}, {"lam", "x"}}), "lam");
  EXPECT_EQ(config_error_field({{"experiment", "train"}, {"lam", 1.0}}), "lam");
  EXPECT_EQ(config_error_field({{"experiment", "solve"}, {"lam", {0.1, 0.2}}}), "lam");
  EXPECT_EQ(config_error_field({{"experiment", "solve"}, {"lam", 0.5}, {"n", 0}}), "n");
  EXPECT_EQ(config_error_field({{"experiment", "solve"}, {"lam", 0.5}, {"solvers", {"sgd"}}}),
            "solvers");
  EXPECT_EQ(config_error_field({{"experiment", "train"}, {"lam", 0.5}, {"variant", "CNN"}}),
            "variant");
  EXPECT_EQ(config_error_field({{"experiment", "depth-comparison"}, {"lam", 0.5}, {"depths", {2, 1}}}),
            "depths");
  EXPECT_EQ(config_error_field({{"experiment", "train"}, {"lam", 0.5}, {"training", {{"init_lr", 0}}}}),
            "training.init_lr");
  EXPECT_EQ(config_error_field({{"experiment", "train"}, {"lam", 0.5}, {"training", {{"lr", 1}}}}),
            "training.lr");
  EXPECT_EQ(config_error_field({{"experiment", "mp-law"}, {"zetas", {1.5}}}), "zetas");
  EXPECT_EQ(config_error_field({{"experiment", "solve"}, {"lam", 0.5},
                                {"dictionary", "/nonexistent/d.csv"}}),
            "dictionary");
}

TEST(Config, DefaultsAndRoundTrip) {
  const ExperimentConfig mp = parse_config({{"experiment", "mp-law"}});
  EXPECT_EQ(mp.n, 200);
  EXPECT_EQ(mp.m, 600);
  const ExperimentConfig c = parse_config(
      {{"experiment", "depth-comparison"}, {"lam", {0.1, 0.8}}, {"depths", {1, 5}}, {"seed", 4}});
  EXPECT_EQ(c.variants.size(), 3u);
  const json echo = config_to_json(c);
  EXPECT_EQ(config_to_json(parse_config(echo)), echo);
}

TEST(Config, EveryPresetParses) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(ADAPTISTA_PRESET_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 7);
}

TEST(Execute, SolveWritesTracesAndOistaDominates) {
  const fs::path dir = scratch("solve");
  ExperimentConfig c = parse_config({{"experiment", "solve"}, {"lam", 0.5}});
  std::ostringstream log;
  ASSERT_EQ(execute(c, dir, log, log), kExitOk) << log.str();
  for (const char* f : {"trace_ista.csv", "trace_fista.csv", "trace_oista.csv", "x.csv",
                        "manifest.json", "config.json", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const json summary = json::parse(slurp(dir / "summary.json"));
  const double f_star = summary["f_star"];
  // Column 1 of the trace CSV is the cost.
  auto costs = [&](const char* f) {
    std::ifstream in(dir / f);
    std::string line;
    std::getline(in, line);
    std::vector<double> out;
    while (std::getline(in, line)) {
      const auto a = line.find(',');
      out.push_back(std::stod(line.substr(a + 1, line.find(',', a + 1) - a - 1)));
    }
    return out;
  };
  const auto ista = costs("trace_ista.csv");
  const auto oista = costs("trace_oista.csv");
  ASSERT_EQ(ista.size(), 301u);
  ASSERT_EQ(oista.size(), 301u);
  for (std::size_t t = 0; t < ista.size(); ++t) {
    EXPECT_LE(oista[t] - f_star, ista[t] - f_star + 1e-12) << "iteration " << t;
  }
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["config"], config_to_json(c));
}

TEST(Execute, ArtifactsAreBitwiseReproducible) {
  const fs::path a = scratch("repro-a"), b = scratch("repro-b");
  const ExperimentConfig c = parse_config({{"experiment", "oista-vs-ista"},
                                           {"lam", {0.5, 0.8}},
                                           {"n", 20},
                                           {"m", 40},
                                           {"repetitions", 3},
                                           {"iterations", 3000}});
  std::ostringstream log;
  ASSERT_EQ(execute(c, a, log, log), kExitOk) << log.str();
  ASSERT_EQ(execute(c, b, log, log), kExitOk) << log.str();
  for (const char* f : {"iterations.csv", "iterations_mean.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  // Re-running from the echoed config reproduces the same artifacts.
  const fs::path r = scratch("repro-rerun");
  ASSERT_EQ(execute(load_config(a / "config.json"), r, log, log), kExitOk);
  EXPECT_EQ(slurp(a / "iterations.csv"), slurp(r / "iterations.csv"));
}

TEST(Execute, MpLawDefaultsMatchTheory) {
  const fs::path dir = scratch("mp");
  std::ostringstream log;
  ASSERT_EQ(execute(parse_config({{"experiment", "mp-law"}}), dir, log, log), kExitOk);
  const json summary = json::parse(slurp(dir / "summary.json"));
  EXPECT_LT(summary["max_abs_deviation"].get<double>(), 0.05);
  const Matrix table = [&] {
    std::ifstream in(dir / "mp.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "zeta,support_size,mean_ratio,theory");
    return read_matrix_csv(in);
  }();
  EXPECT_EQ(table.rows(), 9);
}

TEST(Execute, TrainWritesLoadableNetwork) {
  const fs::path dir = scratch("train");
  const ExperimentConfig c = parse_config({{"experiment", "train"},
                                           {"lam", 0.3},
                                           {"n", 5},
                                           {"m", 8},
                                           {"depth", 3},
                                           {"variant", "LISTA"},
                                           {"n_train", 40},
                                           {"n_test", 40},
                                           {"training", {{"max_epochs", 5}}}});
  std::ostringstream log;
  ASSERT_EQ(execute(c, dir, log, log), kExitOk) << log.str();
  const json net_doc = json::parse(slurp(dir / "network.json"));
  auto dict = gaussian_dictionary(5, 8, RngSpec{0, "train"}.derive("dictionary"));
  const Network net = network_from_json(net_doc, dict);
  EXPECT_EQ(net.depth(), 3);
  EXPECT_EQ(net.variant(), Variant::lista);
  EXPECT_TRUE(fs::exists(dir / "loss_curve.csv"));
}

TEST(Execute, ImportedDictionaryIsUsed) {
  const fs::path dir = scratch("import");
  auto d = gaussian_dictionary(6, 9, RngSpec{3, "imported"});
  export_dictionary(*d, dir / "dict.csv");
  std::ostringstream log;
  const ExperimentConfig c = parse_config(
      {{"experiment", "solve"}, {"lam", 0.4}, {"dictionary", "dict.csv"}, {"iterations", 10}}, dir);
  ASSERT_EQ(execute(c, dir / "run", log, log), kExitOk) << log.str();
  const json summary = json::parse(slurp(dir / "run" / "summary.json"));
  // import renormalizes columns, so compare against the re-imported atoms
  EXPECT_EQ(summary["dictionary"]["hash"], import_dictionary(dir / "dict.csv")->hash_hex());
  EXPECT_EQ(summary["dictionary"]["m"], 9);

  std::ofstream(dir / "bad.csv") << "1,0\n0,0\n";
  const ExperimentConfig bad = parse_config(
      {{"experiment", "solve"}, {"lam", 0.4}, {"dictionary", "bad.csv"}}, dir);
  EXPECT_EQ(execute(bad, dir / "bad-run", log, log), kExitConfig);
  const json manifest = json::parse(slurp(dir / "bad-run" / "manifest.json"));
  EXPECT_EQ(manifest["status"], "failed");
}

TEST(Binary, MissingLamExitsTwoAndNamesField) {
  const fs::path dir = scratch("binary-missing");
  std::ofstream(dir / "cfg.json") << R"({"experiment": "solve", "n": 10})";
  const Shell r = run_cli("experiment " + (dir / "cfg.json").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("lam"), std::string::npos) << r.output;
  EXPECT_EQ(run_cli("experiment " + (dir / "nope.json").string()).code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  EXPECT_EQ(run_cli("train --lam 1.5").code, 2);
}

TEST(Binary, OutputRootAndReport) {
  const fs::path root = scratch("binary-root");
  const Shell r = run_cli("solve --iterations 20 --seed 3", "ADAPTISTA_OUTPUT_ROOT=" + root.string());
  ASSERT_EQ(r.code, 0) << r.output;
  std::vector<fs::path> runs;
  for (const auto& e : fs::directory_iterator(root)) runs.push_back(e.path());
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].filename().string().rfind("solve-", 0), 0u);
  const Shell rep = run_cli("report " + runs[0].string());
  EXPECT_EQ(rep.code, 0);
  EXPECT_NE(rep.output.find("experiment: solve"), std::string::npos) << rep.output;
  EXPECT_NE(rep.output.find("trace_oista.csv (21 rows)"), std::string::npos) << rep.output;
  EXPECT_EQ(run_cli("report " + (root / "missing").string()).code, 2);

  // Presets resolve by name; a run directory re-runs its config.
  const Shell again = run_cli("experiment " + runs[0].string() + " -o " + (root / "again").string());
  ASSERT_EQ(again.code, 0) << again.output;
  EXPECT_EQ(slurp(runs[0] / "trace_oista.csv"), slurp(root / "again" / "trace_oista.csv"));
}
