#include "adaptista/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <adaptista/analysis.hpp>
#include <adaptista/csv.hpp>
#include <adaptista/datagen.hpp>
#include <adaptista/solvers.hpp>
#include <adaptista/training.hpp>

#ifndef ADAPTISTA_VERSION
#define ADAPTISTA_VERSION "unknown"
#endif

namespace adaptista::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

class Artifacts {
 public:
  Artifacts(fs::path dir, RunOutput& out) : dir_(std::move(dir)), out_(out) {}

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(dir_ / name);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    body(f);
    out_.artifacts.push_back(name);
  }

  void write_json(const std::string& name, const json& doc) {
    write(name, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
  }

 private:
  fs::path dir_;
  RunOutput& out_;
};

DictionaryPtr dictionary_for(const ExperimentConfig& c, const RngSpec& base) {
  if (c.dictionary) return import_dictionary(*c.dictionary);
  return gaussian_dictionary(c.n, c.m, base.derive("dictionary"));
}

std::string lam_tag(double lam) { return "lam" + format_double(lam); }

json dictionary_info(const Dictionary& d) {
  return {{"n", d.n_rows()}, {"m", d.n_cols()}, {"lipschitz", d.lipschitz()},
          {"hash", d.hash_hex()}};
}

int first_below(const std::vector<double>& costs, double target) {
  for (std::size_t t = 0; t < costs.size(); ++t) {
    if (costs[t] < target) return static_cast<int>(t);
  }
  return kBudgetExhausted;
}

json count_or_null(int k) { return k == kBudgetExhausted ? json(nullptr) : json(k); }

// F* is the smaller of the 10000-iteration ISTA reference and the best cost
// any solver reached.
double best_optimum(const LassoProblem& p, const std::map<std::string, SolverTrace>& traces) {
  double f = reference_optimum(p);
  for (const auto& [name, tr] : traces) f = std::min(f, *std::min_element(tr.costs.begin(), tr.costs.end()));
  return f;
}

void run_solve(const ExperimentConfig& c, Artifacts& art, RunOutput& out, std::ostream& log) {
  const RngSpec base{c.seed, "solve"};
  const DictionaryPtr dict = dictionary_for(c, base);
  const Matrix x = equiregularization_samples(*dict, 1, base.derive("x"));
  const LassoProblem p(dict, x.col(0), c.lam());
  art.write("x.csv", [&](std::ostream& o) { write_matrix_csv(x.transpose(), o); });
  LipschitzCache cache;
  std::map<std::string, SolverTrace> traces;
  for (const std::string& name : c.solvers) {
    log << "solve: " << name << " for " << c.iterations << " iterations\n";
    traces[name] = run_solver(solver_from_string(name), p, c.iterations, cache);
    art.write("trace_" + name + ".csv", [&](std::ostream& o) { write_trace_csv(traces[name], o); });
  }
  const double f_star = best_optimum(p, traces);
  json solvers = json::object();
  for (const auto& [name, tr] : traces) {
    solvers[name] = {{"final_cost", tr.costs.back()},
                     {"iterations_to_gap", count_or_null(first_below(tr.costs, f_star + c.gap))},
                     {"final_support_size", tr.supports.back().size()},
                     {"support_id_iter", tr.support_id_iter ? json(*tr.support_id_iter) : json(nullptr)}};
  }
  out.summary = {{"dictionary", dictionary_info(*dict)},
                 {"lam", c.lam()},
                 {"f_star", f_star},
                 {"kkt_residual_reference", kkt_check(p, ista(p, kReferenceIstaIterations).final_z,
                                                       kDefaultKktTol).residual},
                 {"solvers", solvers}};
}

void run_oista_vs_ista(const ExperimentConfig& c, Artifacts& art, RunOutput& out,
                       std::ostream& log) {
  const RngSpec base{c.seed, "oista-vs-ista"};
  const DictionaryPtr dict = dictionary_for(c, base);
  const Matrix xs = equiregularization_samples(*dict, c.repetitions, base.derive("x"));
  struct Row {
    double lam;
    int rep;
    double f_star;
    std::map<std::string, int> counts;
  };
  std::vector<Row> rows;
  for (double lam : c.lams) {
    for (Index r = 0; r < xs.cols(); ++r) {
      log << "oista-vs-ista: lam " << lam << " repetition " << r << '\n';
      const LassoProblem p(dict, xs.col(r), lam);
      LipschitzCache cache;
      std::map<std::string, SolverTrace> traces;
      for (const std::string& name : c.solvers) {
        traces[name] = run_solver(solver_from_string(name), p, c.iterations, cache);
      }
      Row row{lam, static_cast<int>(r), best_optimum(p, traces), {}};
      for (const auto& [name, tr] : traces) row.counts[name] = first_below(tr.costs, row.f_star + c.gap);
      rows.push_back(std::move(row));
    }
  }
  auto header = [&](std::ostream& o, const char* lead) {
    o << lead;
    for (const auto& s : c.solvers) o << ',' << s;
  };
  art.write("iterations.csv", [&](std::ostream& o) {
    header(o, "lam,repetition,f_star");
    o << '\n';
    for (const Row& row : rows) {
      o << format_double(row.lam) << ',' << row.rep << ',' << format_double(row.f_star);
      for (const auto& s : c.solvers) {
        o << ',';
        if (row.counts.at(s) != kBudgetExhausted) o << row.counts.at(s);
      }
      o << '\n';
    }
  });
  json means = json::array();
  art.write("iterations_mean.csv", [&](std::ostream& o) {
    header(o, "lam");
    for (const auto& s : c.solvers) o << ',' << s << "_exhausted";
    o << '\n';
    for (double lam : c.lams) {
      json entry{{"lam", lam}};
      o << format_double(lam);
      std::map<std::string, int> exhausted;
      for (const auto& s : c.solvers) {
        double total = 0.0;
        int reached = 0;
        for (const Row& row : rows) {
          if (row.lam != lam) continue;
          if (row.counts.at(s) == kBudgetExhausted) {
            ++exhausted[s];
          } else {
            total += row.counts.at(s);
            ++reached;
          }
        }
        const double mean = reached ? total / reached : 0.0;
        o << ',';
        if (reached) o << format_double(mean);
        entry[s] = reached ? json(mean) : json(nullptr);
      }
      for (const auto& s : c.solvers) o << ',' << exhausted[s];
      o << '\n';
      means.push_back(entry);
    }
  });
  int oista_slower = 0;
  const bool both = std::count(c.solvers.begin(), c.solvers.end(), "ista") &&
                    std::count(c.solvers.begin(), c.solvers.end(), "oista");
  if (both) {
    for (const Row& row : rows) {
      const int o = row.counts.at("oista"), i = row.counts.at("ista");
      if (o == kBudgetExhausted || (i != kBudgetExhausted && o > i)) ++oista_slower;
    }
  }
  out.summary = {{"dictionary", dictionary_info(*dict)},
                 {"gap", c.gap},
                 {"budget", c.iterations},
                 {"means", means}};
  if (both) out.summary["instances_oista_slower_than_ista"] = oista_slower;
}

void run_mp_law(const ExperimentConfig& c, Artifacts& art, RunOutput& out, std::ostream& log) {
  log << "mp-law: " << c.n << "x" << c.m << ", " << c.zetas.size() << " support fractions\n";
  const auto rows = mp_empirical(c.n, c.m, c.zetas, c.repetitions, RngSpec{c.seed, "mp-law"});
  art.write("mp.csv", [&](std::ostream& o) { write_mp_csv(rows, o); });
  double worst = 0.0;
  for (const MpRow& r : rows) worst = std::max(worst, std::abs(r.mean_ratio - r.theory));
  out.summary = {{"n", c.n}, {"m", c.m}, {"max_abs_deviation", worst}};
}

struct TrainedRun {
  DictionaryPtr dict;
  Matrix train_samples;
  Matrix test_samples;
  TrainReport report;
};

TrainedRun train_common(const ExperimentConfig& c, const std::string& label, Artifacts& art,
                        std::ostream& log) {
  const RngSpec base{c.seed, label};
  DictionaryPtr dict = dictionary_for(c, base);
  Matrix train_samples = equiregularization_samples(*dict, c.n_train, base.derive("train"));
  Matrix test_samples = equiregularization_samples(*dict, c.n_test, base.derive("test"));
  log << label << ": training " << to_string(c.training.variant) << " depth " << c.training.n_layers
      << " for up to " << c.training.max_epochs << " epochs\n";
  TrainReport report = train(c.training, initial_network(c.training, dict), train_samples,
                             test_samples, c.lam());
  TrainedRun run{std::move(dict), std::move(train_samples), std::move(test_samples),
                 std::move(report)};
  art.write("loss_curve.csv", [&](std::ostream& o) { write_loss_curve_csv(run.report, o); });
  art.write_json("network.json", network_to_json(run.report.final_network));
  art.write_json("report.json", report_to_json(run.report));
  for (const std::string& w : run.report.warnings) log << "warning: " << w << '\n';
  return run;
}

json training_summary(const TrainedRun& run) {
  double max_alpha = 0.0;
  for (const LayerParams& l : run.report.final_network.layers()) max_alpha = std::max(max_alpha, l.alpha);
  return {{"dictionary", dictionary_info(*run.dict)},
          {"epochs", run.report.epochs()},
          {"train_loss", run.report.train_losses.back()},
          {"test_loss", run.report.test_losses.back()},
          {"ista_test_loss", run.report.baseline_ista_loss},
          {"max_alpha_times_L", max_alpha * run.dict->lipschitz()},
          {"warnings", run.report.warnings}};
}

void run_train(const ExperimentConfig& c, Artifacts& art, RunOutput& out, std::ostream& log) {
  out.summary = training_summary(train_common(c, "train", art, log));
}

void run_steps_figure(const ExperimentConfig& c, Artifacts& art, RunOutput& out,
                      std::ostream& log) {
  const TrainedRun run = train_common(c, "steps-figure", art, log);
  LipschitzCache cache;
  const StepQuantiles q =
      step_support_quantiles(run.report.final_network, run.test_samples, c.lam(), cache);
  art.write("step_quantiles.csv", [&](std::ostream& o) { write_step_quantiles_csv(q, o); });
  out.summary = training_summary(run);
}

void run_coupling_figure(const ExperimentConfig& c, Artifacts& art, RunOutput& out,
                         std::ostream& log) {
  const TrainedRun run = train_common(c, "coupling-figure", art, log);
  out.summary = training_summary(run);
  if (run.report.final_network.variant() != Variant::lista) {
    throw ConfigError("variant", "coupling-figure needs LISTA");
  }
  const std::vector<double> values = coupling_decay(run.report.final_network);
  art.write("coupling.csv", [&](std::ostream& o) {
    o << "layer,coupling\n";
    for (std::size_t t = 0; t < values.size(); ++t) o << t << ',' << format_double(values[t]) << '\n';
  });
  const std::size_t k = std::min<std::size_t>(5, values.size());
  if (k > 0) {
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      first += values[i];
      last += values[values.size() - 1 - i];
    }
    out.summary["coupling_first_mean"] = first / static_cast<double>(k);
    out.summary["coupling_last_mean"] = last / static_cast<double>(k);
  }
}

void run_depth_comparison(const ExperimentConfig& c, Artifacts& art, RunOutput& out,
                          std::ostream& log) {
  const RngSpec base{c.seed, "depth-comparison"};
  DepthCurveData data{dictionary_for(c, base), {}, {}, {}};
  data.train_samples = equiregularization_samples(*data.dict, c.n_train, base.derive("train"));
  data.test_samples = equiregularization_samples(*data.dict, c.n_test, base.derive("test"));
  json curves = json::object();
  for (double lam : c.lams) {
    log << "depth-comparison: reference optima at lam " << lam << '\n';
    data.test_optima = reference_optima(*data.dict, data.test_samples, lam);
    log << "depth-comparison: training " << c.depths.size() << " depths x " << c.variants.size()
        << " variants\n";
    const auto rows = loss_vs_depth_curve(c.training, c.depths, c.variants, data, lam);
    art.write("depth_curve_" + lam_tag(lam) + ".csv",
              [&](std::ostream& o) { write_depth_curve_csv(rows, o); });
    json entries = json::array();
    for (const auto& r : rows) {
      entries.push_back({{"method", r.method}, {"depth", r.depth}, {"gap", r.gap}});
    }
    curves[format_double(lam)] = {{"mean_f_star", data.test_optima.mean()}, {"rows", entries}};
  }
  out.summary = {{"dictionary", dictionary_info(*data.dict)}, {"curves", curves}};
}

void run_bench(const ExperimentConfig& c, Artifacts& art, RunOutput& out, std::ostream& log) {
  const RngSpec base{c.seed, "bench"};
  auto t0 = Clock::now();
  const DictionaryPtr dict = dictionary_for(c, base);
  const double dict_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  const Matrix x = equiregularization_samples(*dict, 1, base.derive("x"));
  const LassoProblem p(dict, x.col(0), c.lam());
  json timings = json::object();
  for (const std::string& name : c.solvers) {
    log << "bench: " << name << '\n';
    std::vector<double> runs;
    LipschitzCache cache;
    double final_cost = 0.0;
    for (int r = 0; r < c.repetitions; ++r) {
      t0 = Clock::now();
      const SolverTrace tr = run_solver(solver_from_string(name), p, c.iterations, cache);
      runs.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      final_cost = tr.costs.back();
    }
    std::sort(runs.begin(), runs.end());
    timings[name] = {{"median_seconds", runs[runs.size() / 2]},
                     {"min_seconds", runs.front()},
                     {"ns_per_iteration",
                      c.iterations ? runs[runs.size() / 2] * 1e9 / c.iterations : 0.0},
                     {"final_cost", final_cost},
                     {"cache_entries", cache.size()}};
  }
  const json doc{{"dictionary", dictionary_info(*dict)},
                 {"dictionary_build_seconds", dict_seconds},
                 {"iterations", c.iterations},
                 {"repetitions", c.repetitions},
                 {"solvers", timings}};
  art.write_json("bench.json", doc);
  out.summary = doc;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

std::string library_version() { return ADAPTISTA_VERSION; }

RunOutput run_experiment(const ExperimentConfig& config, const fs::path& run_dir,
                         std::ostream& log) {
  fs::create_directories(run_dir);
  RunOutput out;
  Artifacts art(run_dir, out);
  const std::string& id = config.experiment;
  if (id == "solve") {
    run_solve(config, art, out, log);
  } else if (id == "oista-vs-ista") {
    run_oista_vs_ista(config, art, out, log);
  } else if (id == "mp-law") {
    run_mp_law(config, art, out, log);
  } else if (id == "train") {
    run_train(config, art, out, log);
  } else if (id == "steps-figure") {
    run_steps_figure(config, art, out, log);
  } else if (id == "coupling-figure") {
    run_coupling_figure(config, art, out, log);
  } else if (id == "depth-comparison") {
    run_depth_comparison(config, art, out, log);
  } else if (id == "bench") {
    run_bench(config, art, out, log);
  } else {
    throw ConfigError("experiment", "unknown experiment id '" + id + "'");
  }
  return out;
}

fs::path default_run_dir(const ExperimentConfig& config) {
  const char* env = std::getenv("ADAPTISTA_OUTPUT_ROOT");
  const fs::path root = env && *env ? fs::path(env) : fs::path("runs");
  const std::string text = config_to_json(config).dump();
  std::ostringstream name;
  name << config.experiment << '-' << std::hex << std::setw(8) << std::setfill('0')
       << (fnv1a64(text.data(), text.size()) & 0xffffffffULL);
  return root / name.str();
}

int execute(const ExperimentConfig& config, const fs::path& run_dir, std::ostream& log,
            std::ostream& err) {
  const auto t0 = Clock::now();
  const std::string started = utc_now();
  try {
    fs::create_directories(run_dir);
  } catch (const fs::filesystem_error& e) {
    err << "error: cannot create run directory: " << e.what() << '\n';
    return kExitFailure;
  }
  const json config_doc = config_to_json(config);
  std::ofstream(run_dir / "config.json") << config_doc.dump(2) << '\n';

  RunOutput out;
  int code = kExitOk;
  std::string error;
  try {
    if (config.dictionary) {
      try {
        import_dictionary(*config.dictionary);
      } catch (const std::exception& e) {
        throw ConfigError("dictionary", e.what());
      }
    }
    out = run_experiment(config, run_dir, log);
  } catch (const ConfigError& e) {
    code = kExitConfig;
    error = e.what();
  } catch (const NumericalError& e) {
    code = kExitNumerical;
    error = e.what();
  } catch (const std::exception& e) {
    code = kExitFailure;
    error = e.what();
  }
  if (code != kExitOk) {
    err << "error: " << error << '\n';
    // Keep whatever artifacts were already written.
    for (const auto& entry : fs::directory_iterator(run_dir)) {
      const std::string name = entry.path().filename().string();
      if (name != "config.json" && name != "manifest.json" && name != "summary.json") {
        out.artifacts.push_back(name);
      }
    }
    std::sort(out.artifacts.begin(), out.artifacts.end());
    out.artifacts.erase(std::unique(out.artifacts.begin(), out.artifacts.end()), out.artifacts.end());
  }
  std::ofstream(run_dir / "summary.json") << out.summary.dump(2) << '\n';

  const json manifest{
      {"tool", "adaptista"},
      {"version", library_version()},
      {"experiment", config.experiment},
      {"config", config_doc},
      {"seed", config.seed},
      {"started_at", started},
      {"wall_clock_seconds", std::chrono::duration<double>(Clock::now() - t0).count()},
      {"status", code == kExitOk ? "ok" : "failed"},
      {"exit_code", code},
      {"error", error.empty() ? json(nullptr) : json(error)},
      {"artifacts", out.artifacts},
      {"rerun", "adaptista experiment " + (run_dir / "config.json").string()}};
  std::ofstream(run_dir / "manifest.json") << manifest.dump(2) << '\n';
  log << "run directory: " << run_dir.string() << '\n';
  return code;
}

int report(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  const fs::path manifest_path = run_dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    err << "error: no manifest.json in " << run_dir.string() << '\n';
    return kExitConfig;
  }
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    err << "error: unreadable manifest: " << e.what() << '\n';
    return kExitConfig;
  }
  out << "experiment: " << manifest.value("experiment", "?") << '\n'
      << "status:     " << manifest.value("status", "?") << '\n'
      << "version:    " << manifest.value("version", "?") << '\n'
      << "started:    " << manifest.value("started_at", "?") << '\n'
      << "wall clock: " << manifest.value("wall_clock_seconds", 0.0) << " s\n";
  if (manifest.contains("error") && manifest["error"].is_string()) {
    out << "error:      " << manifest["error"].get<std::string>() << '\n';
  }
  out << "artifacts:\n";
  for (const auto& a : manifest.value("artifacts", json::array())) {
    const fs::path p = run_dir / a.get<std::string>();
    out << "  " << a.get<std::string>();
    if (!fs::exists(p)) {
      out << " (missing)";
    } else if (p.extension() == ".csv") {
      std::ifstream f(p);
      const auto lines = std::count(std::istreambuf_iterator<char>(f), {}, '\n');
      out << " (" << std::max<long>(0, lines - 1) << " rows)";
    }
    out << '\n';
  }
  std::ifstream summary(run_dir / "summary.json");
  if (summary) {
    try {
      const json s = json::parse(summary);
      out << "summary:\n" << s.dump(2) << '\n';
    } catch (const json::parse_error&) {
      out << "summary: unreadable\n";
    }
  }
  return manifest.value("exit_code", 0) == 0 ? kExitOk : kExitFailure;
}

}  // namespace adaptista::cli
