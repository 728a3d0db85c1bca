#pragma once

#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "adaptista/model.hpp"

namespace adaptista {

enum class Variant { lista, slista, alista };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// One unfolded layer  z -> ST(z - alpha W^T (D z - x), beta lam).
///   LISTA:  W, alpha, beta learned.
///   SLISTA: W = D and beta = alpha implied; `w` is left empty.
///   ALISTA: W fixed (analytic weights), alpha and beta learned.
struct LayerParams {
  Variant variant = Variant::slista;
  Matrix w;
  double alpha = 0.0;
  double beta = 0.0;

  double threshold_scale() const noexcept {
    return variant == Variant::slista ? alpha : beta;
  }
};

class Network {
 public:
  Network(DictionaryPtr dict, Variant variant, std::vector<LayerParams> layers);

  /// T layers reproducing T ISTA iterations: W = D, alpha = beta = 1/L. For
  /// ALISTA, W is the analytic matrix with the same initial steps.
  static Network ista_initialized(DictionaryPtr dict, Variant variant, int n_layers);

  const Dictionary& dictionary() const noexcept { return *dict_; }
  const DictionaryPtr& dictionary_ptr() const noexcept { return dict_; }
  Variant variant() const noexcept { return variant_; }
  int depth() const noexcept { return static_cast<int>(layers_.size()); }
  const std::vector<LayerParams>& layers() const noexcept { return layers_; }
  std::vector<LayerParams>& mutable_layers() noexcept { return layers_; }

  /// Weight matrix W^(t) of layer t (D for SLISTA).
  const Matrix& weights(int t) const;

 private:
  void validate() const;

  DictionaryPtr dict_;
  Variant variant_;
  std::vector<LayerParams> layers_;
};

/// Everything a reverse pass needs. Columns are independent samples.
struct ForwardPass {
  std::vector<Matrix> iterates;        ///< z^(0) .. z^(T), m x N each
  std::vector<Matrix> preactivations;  ///< z - alpha W^T (D z - x), per layer
  std::vector<Matrix> residuals;       ///< D z^(t) - x, per layer
  std::vector<Matrix> directions;      ///< W^T (D z^(t) - x), per layer
  double lam = 0.0;

  const Matrix& output() const { return iterates.back(); }
};

struct LayerGradient {
  Matrix w;  ///< LISTA only, n x m
  double alpha = 0.0;
  double beta = 0.0;  ///< zero for SLISTA (folded into alpha)
};

struct ParamGradient {
  std::vector<LayerGradient> layers;

  /// Sum of squared entries across all layers.
  double squared_norm() const;
};

Vector layer_forward(const LayerParams& layer, const Dictionary& dict,
                     const Vector& z, const Vector& x, double lam);

/// Runs the network from z^(0) = 0 on each column of x.
ForwardPass network_forward(const Network& net, const Matrix& x, double lam);

/// Subgradient of the mean over columns of F_x(Phi(x)) with respect to every
/// learnable parameter. ST is differentiated with derivative 0 at the kinks
/// |u| = threshold, and sign(0) = 0 in the l1 term.
ParamGradient network_backward(const Network& net, const Matrix& x, double lam,
                               const ForwardPass& pass);

/// mean_i F_{x_i}(z_i) for codes z (columns) and inputs x (columns).
double mean_lasso_cost(const Matrix& atoms, const Matrix& x, double lam,
                       const Matrix& z);

/// Per-sample Lasso cost of the columns of z.
Vector lasso_costs(const Matrix& atoms, const Matrix& x, double lam,
                   const Matrix& z);

struct AlistaWeights {
  Matrix w;
  std::vector<Index> infeasible_columns;
};

/// Column-wise solution of  min_W ||W^T D||_F^2  s.t.  diag(W^T D) = 1:
///   W_j = (D D^T + ridge I)^{-1} D_j / (D_j^T (D D^T + ridge I)^{-1} D_j).
AlistaWeights alista_weights(const Dictionary& dict, double ridge = 1e-10);

/// Layer in the untied form z -> ST(W_x x + W_z z, theta), with
/// W_x = alpha W^T, W_z = I - alpha W^T D and theta = beta lam. Only used to
/// cross-check layer_forward; it is never trained.
struct UntiedLayer {
  Matrix w_x;  ///< m x n
  Matrix w_z;  ///< m x m
  double threshold = 0.0;
};

UntiedLayer to_untied(const LayerParams& layer, const Dictionary& dict, double lam);
Vector untied_forward(const UntiedLayer& layer, const Vector& z, const Vector& x);

/// ||alpha W - beta D||_F (0 for SLISTA layers).
double coupling_metric(const LayerParams& layer, const Dictionary& dict);

/// {"variant", "n_layers", "dictionary": {"hash", "n_rows", "n_cols"},
///  "layers": [{"alpha", "beta", "w": [row-major]}]}
nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc, DictionaryPtr dict);

}  // namespace adaptista
