#include "adaptista/training.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "adaptista/csv.hpp"

namespace adaptista {

namespace {

constexpr double kMinLearningRate = 1e-12;
constexpr double kOverfitWarning = 0.2;

double batch_loss(const Network& net, const Matrix& samples, double lam,
                  const ForwardPass& pass) {
  return mean_lasso_cost(net.dictionary().atoms(), samples, lam, pass.output());
}

// theta - lr * grad, or nullopt when a step size would leave (0, inf).
std::optional<Network> propose(const Network& net, const ParamGradient& grad, double lr) {
  std::vector<LayerParams> layers = net.layers();
  for (std::size_t t = 0; t < layers.size(); ++t) {
    LayerParams& layer = layers[t];
    const LayerGradient& g = grad.layers[t];
    layer.alpha -= lr * g.alpha;
    switch (layer.variant) {
      case Variant::lista:
        layer.w.noalias() -= lr * g.w;
        layer.beta -= lr * g.beta;
        break;
      case Variant::slista:
        layer.beta = layer.alpha;
        break;
      case Variant::alista:
        layer.beta -= lr * g.beta;
        break;
    }
    if (!(layer.alpha > 0.0) || !(layer.beta > 0.0) || !std::isfinite(layer.alpha) ||
        !std::isfinite(layer.beta)) {
      return std::nullopt;
    }
  }
  return Network(net.dictionary_ptr(), net.variant(), std::move(layers));
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("TrainConfig." + field + ": " + why);
  };
  if (n_layers < 0) fail("n_layers", "must be >= 0");
  if (max_epochs < 0) fail("max_epochs", "must be >= 0");
  if (!(init_lr > 0.0) || !std::isfinite(init_lr)) fail("init_lr", "must be finite and > 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    fail("backtrack_factor", "must lie in (0, 1)");
  }
  if (max_backtracks < 1) fail("max_backtracks", "must be >= 1");
  if (!(grow_factor >= 1.0) || !std::isfinite(grow_factor)) fail("grow_factor", "must be >= 1");
  if (!(backtrack_factor * grow_factor < 2.0)) {
    fail("grow_factor", "backtrack_factor * grow_factor must be < 2");
  }
  if (!(kkt_tol > 0.0)) fail("kkt_tol", "must be > 0");
}

double empirical_loss(const Network& net, const Matrix& samples, double lam) {
  if (samples.cols() == 0) throw std::invalid_argument("empirical_loss: empty sample set");
  return batch_loss(net, samples, lam, network_forward(net, samples, lam));
}

Network initial_network(const TrainConfig& config, DictionaryPtr dict) {
  return Network::ista_initialized(std::move(dict), config.variant, config.n_layers);
}

TrainReport train(const TrainConfig& config, const Network& net0,
                  const Matrix& train_samples, const Matrix& test_samples,
                  double lam) {
  config.validate();
  if (net0.variant() != config.variant || net0.depth() != config.n_layers) {
    throw std::invalid_argument("train: initial network does not match the config");
  }
  if (train_samples.cols() == 0 || test_samples.cols() == 0) {
    throw std::invalid_argument("train: empty train or test set");
  }
  if (!(lam > 0.0 && lam < 1.0)) throw std::invalid_argument("train: lam must lie in (0, 1)");

  TrainReport report{.final_network = net0};
  Network net = net0;
  ForwardPass pass = network_forward(net, train_samples, lam);
  double loss = batch_loss(net, train_samples, lam, pass);
  if (!std::isfinite(loss)) throw NumericalError("train: initial loss is not finite");
  report.train_losses.push_back(loss);
  report.test_losses.push_back(empirical_loss(net, test_samples, lam));

  const Network ista_net =
      Network::ista_initialized(net0.dictionary_ptr(), Variant::slista, config.n_layers);
  report.baseline_ista_loss = empirical_loss(ista_net, test_samples, lam);

  double lr = config.init_lr;
  for (int epoch = 1; epoch <= config.max_epochs && lr >= kMinLearningRate; ++epoch) {
    const ParamGradient grad = network_backward(net, train_samples, lam, pass);
    const double grad_norm = grad.squared_norm();
    if (!std::isfinite(grad_norm)) {
      throw NumericalError("train: non-finite gradient at epoch " + std::to_string(epoch));
    }
    if (grad_norm == 0.0) break;

    bool accepted = false;
    int backtracks = 0;
    double used_lr = lr;
    for (; backtracks <= config.max_backtracks; ++backtracks) {
      used_lr = lr;
      if (auto candidate = propose(net, grad, lr)) {
        ForwardPass candidate_pass = network_forward(*candidate, train_samples, lam);
        const double candidate_loss = batch_loss(*candidate, train_samples, lam, candidate_pass);
        if (std::isfinite(candidate_loss) && candidate_loss <= loss) {
          net = std::move(*candidate);
          pass = std::move(candidate_pass);
          loss = candidate_loss;
          accepted = true;
          break;
        }
      }
      if (backtracks < config.max_backtracks) lr *= config.backtrack_factor;
    }
    if (accepted) lr *= config.grow_factor;

    report.train_losses.push_back(loss);
    report.test_losses.push_back(empirical_loss(net, test_samples, lam));
    report.lr_history.push_back(used_lr);
    report.backtracks.push_back(backtracks);
    if (!accepted) lr *= config.backtrack_factor;
  }

  const double train_final = report.train_losses.back();
  const double test_final = report.test_losses.back();
  if (std::abs(test_final - train_final) > kOverfitWarning * std::abs(train_final)) {
    report.warnings.push_back("test loss differs from train loss by more than 20%");
  }
  report.final_network = std::move(net);
  return report;
}

nlohmann::json report_to_json(const TrainReport& report) {
  nlohmann::json doc;
  doc["train_losses"] = report.train_losses;
  doc["test_losses"] = report.test_losses;
  doc["lr_history"] = report.lr_history;
  doc["backtracks"] = report.backtracks;
  doc["baseline_ista_loss"] = report.baseline_ista_loss;
  doc["warnings"] = report.warnings;
  doc["final_network"] = network_to_json(report.final_network);
  return doc;
}

void write_loss_curve_csv(const TrainReport& report, std::ostream& out) {
  out << "epoch,train_loss,test_loss,lr\n";
  for (std::size_t e = 0; e < report.train_losses.size(); ++e) {
    out << e << ',' << format_double(report.train_losses[e]) << ','
        << format_double(report.test_losses[e]) << ',';
    if (e > 0) out << format_double(report.lr_history[e - 1]);
    out << '\n';
  }
}

std::vector<DepthCurveRow> loss_vs_depth_curve(const TrainConfig& config_template,
                                               const std::vector<int>& depths,
                                               const std::vector<Variant>& variants,
                                               const DepthCurveData& data,
                                               double lam) {
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) {
      throw std::invalid_argument("loss_vs_depth_curve: depths must be ascending");
    }
  }
  const double mean_optimum = data.test_optima.mean();
  std::vector<DepthCurveRow> rows;
  for (int depth : depths) {
    const Network ista_net = Network::ista_initialized(data.dict, Variant::slista, depth);
    const double ista_loss = empirical_loss(ista_net, data.test_samples, lam);
    rows.push_back({"ISTA", depth, ista_loss, ista_loss - mean_optimum});
    for (Variant variant : variants) {
      TrainConfig config = config_template;
      config.variant = variant;
      config.n_layers = depth;
      const Network net0 = initial_network(config, data.dict);
      const TrainReport report =
          train(config, net0, data.train_samples, data.test_samples, lam);
      const double test_loss = report.test_losses.back();
      rows.push_back({std::string(to_string(variant)), depth, test_loss,
                      test_loss - mean_optimum});
    }
  }
  return rows;
}

void write_depth_curve_csv(const std::vector<DepthCurveRow>& rows, std::ostream& out) {
  out << "method,depth,test_loss,gap\n";
  for (const DepthCurveRow& row : rows) {
    out << row.method << ',' << row.depth << ',' << format_double(row.test_loss) << ','
        << format_double(row.gap) << '\n';
  }
}

}  // namespace adaptista
