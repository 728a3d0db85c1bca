#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "adaptista/networks.hpp"

namespace adaptista {

struct TrainConfig {
  int n_layers = 20;
  Variant variant = Variant::slista;
  int max_epochs = 200;
  double init_lr = 1.0;
  double backtrack_factor = 0.5;
  int max_backtracks = 30;
  double grow_factor = 1.1;
  std::uint64_t seed = 0;
  double kkt_tol = kDefaultKktTol;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

struct TrainReport {
  std::vector<double> train_losses{};  ///< index 0 is the initial network
  std::vector<double> test_losses{};
  std::vector<double> lr_history{};    ///< learning rate of each epoch's last proposal
  std::vector<int> backtracks{};       ///< halvings spent in each epoch
  Network final_network;
  double baseline_ista_loss = 0.0;     ///< test loss of depth-T ISTA
  std::vector<std::string> warnings{};

  int epochs() const noexcept { return static_cast<int>(train_losses.size()) - 1; }
};

/// mean over columns of F_x(Phi(x)).
double empirical_loss(const Network& net, const Matrix& samples, double lam);

/// Initial network per the config: the ISTA point (W = D where learned,
/// alpha = beta = 1/L).
Network initial_network(const TrainConfig& config, DictionaryPtr dict);

/// Full-batch subgradient descent with backtracking. Each epoch proposes
/// theta - lr * g; a proposal that raises the training loss (or leaves the
/// positive step-size domain) is retried with lr * backtrack_factor, at most
/// max_backtracks times; an accepted step multiplies lr by grow_factor.
/// Stops after max_epochs or once lr < 1e-12. Throws NumericalError if the
/// loss becomes non-finite.
TrainReport train(const TrainConfig& config, const Network& net0,
                  const Matrix& train_samples, const Matrix& test_samples,
                  double lam);

nlohmann::json report_to_json(const TrainReport& report);

/// CSV with header epoch,train_loss,test_loss,lr (lr is empty for epoch 0).
void write_loss_curve_csv(const TrainReport& report, std::ostream& out);

struct DepthCurveRow {
  std::string method;  ///< "ISTA" or a variant name
  int depth = 0;
  double test_loss = 0.0;
  double gap = 0.0;    ///< test_loss - mean F*
};

struct DepthCurveData {
  DictionaryPtr dict;
  Matrix train_samples;
  Matrix test_samples;
  Vector test_optima;  ///< F* per test column
};

/// Trains one network per (variant, depth) from the template config and
/// reports its test loss, plus untrained ISTA at every depth.
std::vector<DepthCurveRow> loss_vs_depth_curve(const TrainConfig& config_template,
                                               const std::vector<int>& depths,
                                               const std::vector<Variant>& variants,
                                               const DepthCurveData& data,
                                               double lam);

void write_depth_curve_csv(const std::vector<DepthCurveRow>& rows, std::ostream& out);

}  // namespace adaptista
