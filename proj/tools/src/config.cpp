#include "adaptista/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <adaptista/solvers.hpp>

namespace adaptista::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevel{
    "experiment", "n",       "m",          "lam",     "seed",    "iterations",
    "repetitions", "gap",    "solvers",    "zetas",   "depth",   "depths",
    "variant",    "variants", "n_train",   "n_test",  "training", "dictionary"};

const std::set<std::string> kTraining{"max_epochs", "init_lr", "backtrack_factor",
                                       "max_backtracks", "grow_factor", "kkt_tol"};

bool uses_training(const std::string& id) {
  return id == "train" || id == "steps-figure" || id == "coupling-figure" ||
         id == "depth-comparison";
}

bool single_lambda(const std::string& id) {
  return id != "oista-vs-ista" && id != "depth-comparison";
}

template <typename T>
T get_field(const json& doc, const std::string& key, const std::string& field) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
  return d;
}

std::int64_t integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<std::int64_t>();
}

std::vector<double> numbers(const json& v, const std::string& field) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(number(v, field));
  }
  if (out.empty()) throw ConfigError(field, "must not be empty");
  return out;
}

std::int64_t at_least(const json& v, const std::string& field, std::int64_t lo) {
  const std::int64_t i = integer(v, field);
  if (i < lo) throw ConfigError(field, "must be >= " + std::to_string(lo));
  return i;
}

// Per-experiment defaults, matching the figure protocols where one exists.
void apply_defaults(ExperimentConfig& c) {
  const std::string& id = c.experiment;
  if (id == "solve") {
    c.n = 10, c.m = 50, c.iterations = 300;
  } else if (id == "oista-vs-ista") {
    c.n = 100, c.m = 200, c.iterations = 20000, c.repetitions = 10;
  } else if (id == "mp-law") {
    c.n = 200, c.m = 600, c.repetitions = 5;
  } else if (id == "train" || id == "steps-figure") {
    c.n = 10, c.m = 20, c.depth = 20, c.variants = {Variant::slista};
  } else if (id == "coupling-figure") {
    c.n = 10, c.m = 20, c.depth = 40, c.variants = {Variant::lista};
  } else if (id == "depth-comparison") {
    c.n = 32, c.m = 128, c.depths = {0, 1, 2, 5, 10, 20};
    c.variants = {Variant::slista, Variant::lista, Variant::alista};
  } else if (id == "bench") {
    c.n = 100, c.m = 200, c.iterations = 1000, c.repetitions = 5;
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevel.count(key)) throw ConfigError(key, "unknown field");
  }
  ExperimentConfig c;
  if (!doc.contains("experiment")) throw ConfigError("experiment", "required field missing");
  c.experiment = get_field<std::string>(doc, "experiment", "experiment");
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), c.experiment) == ids.end()) {
    throw ConfigError("experiment", "unknown experiment id '" + c.experiment + "'");
  }

  apply_defaults(c);

  if (c.experiment != "mp-law") {
    if (!doc.contains("lam")) throw ConfigError("lam", "required field missing");
    c.lams = numbers(doc["lam"], "lam");
    if (single_lambda(c.experiment) && c.lams.size() != 1) {
      throw ConfigError("lam", "experiment '" + c.experiment + "' takes a single value");
    }
    const bool trains = uses_training(c.experiment);
    for (double lam : c.lams) {
      if (!(lam > 0.0)) throw ConfigError("lam", "must be > 0");
      if (trains && !(lam < 1.0)) throw ConfigError("lam", "must be in (0, 1) for training");
    }
  } else if (doc.contains("lam")) {
    throw ConfigError("lam", "not used by mp-law");
  }

  if (doc.contains("n")) c.n = at_least(doc["n"], "n", 1);
  if (doc.contains("m")) c.m = at_least(doc["m"], "m", 1);
  if (doc.contains("seed")) {
    const json& v = doc["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) throw ConfigError("seed", "expected a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("iterations")) {
    c.iterations = static_cast<int>(at_least(doc["iterations"], "iterations", 0));
  }
  if (doc.contains("repetitions")) {
    c.repetitions = static_cast<int>(at_least(doc["repetitions"], "repetitions", 1));
  }
  if (doc.contains("gap")) {
    c.gap = number(doc["gap"], "gap");
    if (!(c.gap > 0.0)) throw ConfigError("gap", "must be > 0");
  }
  if (doc.contains("solvers")) {
    c.solvers = get_field<std::vector<std::string>>(doc, "solvers", "solvers");
    if (c.solvers.empty()) throw ConfigError("solvers", "must not be empty");
    for (const auto& s : c.solvers) {
      try {
        solver_from_string(s);
      } catch (const std::invalid_argument&) {
        throw ConfigError("solvers", "unknown solver '" + s + "'");
      }
    }
  }
  if (doc.contains("zetas")) {
    c.zetas = numbers(doc["zetas"], "zetas");
    for (double z : c.zetas) {
      if (z < 0.0 || z > 1.0) throw ConfigError("zetas", "values must be in [0, 1]");
    }
  }
  if (doc.contains("depth")) c.depth = static_cast<int>(at_least(doc["depth"], "depth", 0));
  if (doc.contains("depths")) {
    if (!doc["depths"].is_array() || doc["depths"].empty()) {
      throw ConfigError("depths", "expected a non-empty array");
    }
    c.depths.clear();
    for (std::size_t i = 0; i < doc["depths"].size(); ++i) {
      c.depths.push_back(static_cast<int>(
          at_least(doc["depths"][i], "depths[" + std::to_string(i) + "]", 0)));
    }
    if (!std::is_sorted(c.depths.begin(), c.depths.end()) ||
        std::adjacent_find(c.depths.begin(), c.depths.end()) != c.depths.end()) {
      throw ConfigError("depths", "must be strictly ascending");
    }
  }
  auto parse_variant = [](const json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigError(field, "expected a string");
    try {
      return variant_from_string(v.get<std::string>());
    } catch (const std::invalid_argument&) {
      throw ConfigError(field, "unknown variant '" + v.get<std::string>() + "'");
    }
  };
  if (doc.contains("variant") && doc.contains("variants")) {
    throw ConfigError("variant", "give either 'variant' or 'variants'");
  }
  if (doc.contains("variant")) c.variants = {parse_variant(doc["variant"], "variant")};
  if (doc.contains("variants")) {
    if (!doc["variants"].is_array() || doc["variants"].empty()) {
      throw ConfigError("variants", "expected a non-empty array");
    }
    c.variants.clear();
    for (std::size_t i = 0; i < doc["variants"].size(); ++i) {
      c.variants.push_back(parse_variant(doc["variants"][i], "variants[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("n_train")) c.n_train = at_least(doc["n_train"], "n_train", 1);
  if (doc.contains("n_test")) c.n_test = at_least(doc["n_test"], "n_test", 1);

  if (doc.contains("training")) {
    const json& t = doc["training"];
    if (!t.is_object()) throw ConfigError("training", "expected an object");
    for (const auto& [key, value] : t.items()) {
      if (!kTraining.count(key)) throw ConfigError("training." + key, "unknown field");
    }
    if (t.contains("max_epochs")) {
      c.training.max_epochs = static_cast<int>(at_least(t["max_epochs"], "training.max_epochs", 0));
    }
    if (t.contains("init_lr")) c.training.init_lr = number(t["init_lr"], "training.init_lr");
    if (t.contains("backtrack_factor")) {
      c.training.backtrack_factor = number(t["backtrack_factor"], "training.backtrack_factor");
    }
    if (t.contains("max_backtracks")) {
      c.training.max_backtracks =
          static_cast<int>(at_least(t["max_backtracks"], "training.max_backtracks", 1));
    }
    if (t.contains("grow_factor")) {
      c.training.grow_factor = number(t["grow_factor"], "training.grow_factor");
    }
    if (t.contains("kkt_tol")) c.training.kkt_tol = number(t["kkt_tol"], "training.kkt_tol");
  }
  c.training.n_layers = c.depth;
  c.training.variant = c.variants.front();
  c.training.seed = c.seed;
  try {
    c.training.validate();
  } catch (const std::invalid_argument& e) {
    // "TrainConfig.init_lr must ..." -> field training.init_lr
    std::string msg = e.what();
    std::string field = "training";
    const auto pos = msg.find("TrainConfig.");
    if (pos != std::string::npos) {
      const auto end = msg.find_first_of(" :", pos);
      field = "training." + msg.substr(pos + 12, end - pos - 12);
    }
    throw ConfigError(field, msg);
  }

  if (doc.contains("dictionary")) {
    std::filesystem::path p = get_field<std::string>(doc, "dictionary", "dictionary");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::is_regular_file(p)) {
      throw ConfigError("dictionary", "file not found: " + p.string());
    }
    c.dictionary = p;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["experiment"] = c.experiment;
  doc["n"] = c.n;
  doc["m"] = c.m;
  if (!c.lams.empty()) {
    if (c.lams.size() == 1) {
      doc["lam"] = c.lams.front();
    } else {
      doc["lam"] = c.lams;
    }
  }
  doc["seed"] = c.seed;
  doc["iterations"] = c.iterations;
  doc["repetitions"] = c.repetitions;
  doc["gap"] = c.gap;
  doc["solvers"] = c.solvers;
  doc["zetas"] = c.zetas;
  doc["depth"] = c.depth;
  doc["depths"] = c.depths;
  json variants = json::array();
  for (Variant v : c.variants) variants.push_back(std::string(to_string(v)));
  doc["variants"] = variants;
  doc["n_train"] = c.n_train;
  doc["n_test"] = c.n_test;
  doc["training"] = {{"max_epochs", c.training.max_epochs},
                     {"init_lr", c.training.init_lr},
                     {"backtrack_factor", c.training.backtrack_factor},
                     {"max_backtracks", c.training.max_backtracks},
                     {"grow_factor", c.training.grow_factor},
                     {"kkt_tol", c.training.kkt_tol}};
  if (c.dictionary) doc["dictionary"] = std::filesystem::absolute(*c.dictionary).string();
  return doc;
}

}  // namespace adaptista::cli
