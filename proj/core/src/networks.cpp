#include "adaptista/networks.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace adaptista {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::lista: return "LISTA";
    case Variant::slista: return "SLISTA";
    case Variant::alista: return "ALISTA";
  }
  return "?";
}

Variant variant_from_string(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "LISTA") return Variant::lista;
  if (upper == "SLISTA") return Variant::slista;
  if (upper == "ALISTA") return Variant::alista;
  throw std::invalid_argument("unknown network variant '" + std::string(name) + "'");
}

Network::Network(DictionaryPtr dict, Variant variant, std::vector<LayerParams> layers)
    : dict_(std::move(dict)), variant_(variant), layers_(std::move(layers)) {
  if (!dict_) throw std::invalid_argument("Network: null dictionary");
  validate();
}

void Network::validate() const {
  for (std::size_t t = 0; t < layers_.size(); ++t) {
    const LayerParams& layer = layers_[t];
    const std::string where = "Network layer " + std::to_string(t);
    if (layer.variant != variant_) {
      throw std::invalid_argument(where + ": variant differs from the network's");
    }
    if (!(layer.alpha > 0.0) || !std::isfinite(layer.alpha)) {
      throw std::invalid_argument(where + ": alpha must be finite and > 0");
    }
    if (variant_ == Variant::slista) {
      if (layer.w.size() != 0) {
        throw std::invalid_argument(where + ": SLISTA layers carry no weight matrix");
      }
      continue;
    }
    if (!(layer.beta > 0.0) || !std::isfinite(layer.beta)) {
      throw std::invalid_argument(where + ": beta must be finite and > 0");
    }
    if (layer.w.rows() != dict_->n_rows() || layer.w.cols() != dict_->n_cols()) {
      throw DimensionError(where + ": W must be n x m");
    }
  }
}

Network Network::ista_initialized(DictionaryPtr dict, Variant variant, int n_layers) {
  if (!dict) throw std::invalid_argument("Network: null dictionary");
  if (n_layers < 0) throw std::invalid_argument("Network: n_layers must be >= 0");
  const double step = 1.0 / dict->lipschitz();
  LayerParams layer{variant, Matrix(), step, step};
  if (variant == Variant::lista) {
    layer.w = dict->atoms();
  } else if (variant == Variant::alista) {
    AlistaWeights analytic = alista_weights(*dict);
    if (!analytic.infeasible_columns.empty()) {
      throw NumericalError("ALISTA weights infeasible for " +
                           std::to_string(analytic.infeasible_columns.size()) +
                           " column(s)");
    }
    layer.w = std::move(analytic.w);
  }
  return Network(std::move(dict), variant,
                 std::vector<LayerParams>(static_cast<std::size_t>(n_layers), layer));
}

const Matrix& Network::weights(int t) const {
  const LayerParams& layer = layers_.at(static_cast<std::size_t>(t));
  return variant_ == Variant::slista ? dict_->atoms() : layer.w;
}

double ParamGradient::squared_norm() const {
  double total = 0.0;
  for (const LayerGradient& g : layers) {
    total += g.w.squaredNorm() + g.alpha * g.alpha + g.beta * g.beta;
  }
  return total;
}

Vector layer_forward(const LayerParams& layer, const Dictionary& dict,
                     const Vector& z, const Vector& x, double lam) {
  if (z.size() != dict.n_cols() || x.size() != dict.n_rows()) {
    throw DimensionError("layer_forward: z or x has wrong length");
  }
  const Matrix& w = layer.variant == Variant::slista ? dict.atoms() : layer.w;
  if (w.rows() != dict.n_rows() || w.cols() != dict.n_cols()) {
    throw DimensionError("layer_forward: W must be n x m");
  }
  Vector residual = dict.atoms() * z;
  residual -= x;
  Vector out = z;
  out.noalias() -= layer.alpha * (w.transpose() * residual);
  soft_threshold_inplace(out, layer.threshold_scale() * lam);
  return out;
}

ForwardPass network_forward(const Network& net, const Matrix& x, double lam) {
  const Dictionary& dict = net.dictionary();
  if (x.rows() != dict.n_rows()) {
    throw DimensionError("network_forward: inputs must have n rows");
  }
  const Matrix& d = dict.atoms();
  ForwardPass pass;
  pass.lam = lam;
  const auto depth = static_cast<std::size_t>(net.depth());
  pass.iterates.reserve(depth + 1);
  pass.preactivations.reserve(depth);
  pass.residuals.reserve(depth);
  pass.directions.reserve(depth);
  pass.iterates.push_back(Matrix::Zero(dict.n_cols(), x.cols()));
  for (int t = 0; t < net.depth(); ++t) {
    const LayerParams& layer = net.layers()[static_cast<std::size_t>(t)];
    const Matrix& z = pass.iterates.back();
    Matrix residual = d * z;
    residual -= x;
    Matrix direction = net.weights(t).transpose() * residual;
    Matrix pre = z;
    pre.noalias() -= layer.alpha * direction;
    Matrix next = pre;
    soft_threshold_inplace(next, layer.threshold_scale() * lam);
    pass.residuals.push_back(std::move(residual));
    pass.directions.push_back(std::move(direction));
    pass.preactivations.push_back(std::move(pre));
    pass.iterates.push_back(std::move(next));
  }
  return pass;
}

ParamGradient network_backward(const Network& net, const Matrix& x, double lam,
                               const ForwardPass& pass) {
  const Dictionary& dict = net.dictionary();
  const Matrix& d = dict.atoms();
  const auto depth = static_cast<std::size_t>(net.depth());
  if (pass.iterates.size() != depth + 1 || pass.preactivations.size() != depth ||
      pass.residuals.size() != depth || pass.directions.size() != depth) {
    throw std::invalid_argument("network_backward: forward pass does not match network depth");
  }
  if (x.rows() != dict.n_rows() || pass.output().cols() != x.cols() ||
      pass.output().rows() != dict.n_cols()) {
    throw DimensionError("network_backward: forward pass does not match inputs");
  }
  const double inv_count = 1.0 / static_cast<double>(x.cols());

  // d/dz of the mean cost at the output.
  const Matrix& out = pass.output();
  Matrix grad_z = d.transpose() * (d * out - x);
  grad_z += lam * out.unaryExpr([](double v) {
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  });
  grad_z *= inv_count;

  ParamGradient result;
  result.layers.resize(depth);
  for (std::size_t k = depth; k-- > 0;) {
    const LayerParams& layer = net.layers()[k];
    const Matrix& pre = pass.preactivations[k];
    const double threshold = layer.threshold_scale() * lam;

    // Through ST: pass-through where |u| > threshold, zero elsewhere.
    Matrix grad_pre(pre.rows(), pre.cols());
    double grad_threshold = 0.0;
    for (Index idx = 0; idx < pre.size(); ++idx) {
      const double u = pre.data()[idx];
      const double g = grad_z.data()[idx];
      if (u > threshold) {
        grad_pre.data()[idx] = g;
        grad_threshold -= g;
      } else if (u < -threshold) {
        grad_pre.data()[idx] = g;
        grad_threshold += g;
      } else {
        grad_pre.data()[idx] = 0.0;
      }
    }

    LayerGradient& lg = result.layers[k];
    const double grad_alpha = -(pass.directions[k].cwiseProduct(grad_pre)).sum();
    const double grad_beta_like = lam * grad_threshold;
    switch (layer.variant) {
      case Variant::lista:
        lg.w.noalias() = (-layer.alpha) * (pass.residuals[k] * grad_pre.transpose());
        lg.alpha = grad_alpha;
        lg.beta = grad_beta_like;
        break;
      case Variant::slista:
        lg.alpha = grad_alpha + grad_beta_like;
        break;
      case Variant::alista:
        lg.alpha = grad_alpha;
        lg.beta = grad_beta_like;
        break;
    }

    if (k > 0) {
      // z_t enters through the identity term and through r = D z_t - x.
      const Matrix grad_residual = (-layer.alpha) * (net.weights(static_cast<int>(k)) * grad_pre);
      grad_z = grad_pre;
      grad_z.noalias() += d.transpose() * grad_residual;
    }
  }
  return result;
}

Vector lasso_costs(const Matrix& atoms, const Matrix& x, double lam, const Matrix& z) {
  if (x.rows() != atoms.rows() || z.rows() != atoms.cols() || x.cols() != z.cols()) {
    throw DimensionError("lasso_costs: shapes disagree");
  }
  const Matrix residual = x - atoms * z;
  Vector costs(x.cols());
  for (Index i = 0; i < x.cols(); ++i) {
    costs[i] = 0.5 * residual.col(i).squaredNorm() + lam * z.col(i).lpNorm<1>();
  }
  return costs;
}

double mean_lasso_cost(const Matrix& atoms, const Matrix& x, double lam, const Matrix& z) {
  return lasso_costs(atoms, x, lam, z).mean();
}

AlistaWeights alista_weights(const Dictionary& dict, double ridge) {
  const Matrix& d = dict.atoms();
  Matrix system = d * d.transpose();
  system.diagonal().array() += ridge;
  const Eigen::LDLT<Matrix> factor(system);
  AlistaWeights out;
  out.w.resize(d.rows(), d.cols());
  if (factor.info() != Eigen::Success) {
    out.w.setZero();
    for (Index j = 0; j < d.cols(); ++j) out.infeasible_columns.push_back(j);
    return out;
  }
  const Matrix solved = factor.solve(d);
  for (Index j = 0; j < d.cols(); ++j) {
    const double quad = d.col(j).dot(solved.col(j));
    if (!(quad > 0.0) || !std::isfinite(quad)) {
      out.infeasible_columns.push_back(j);
      out.w.col(j).setZero();
      continue;
    }
    out.w.col(j) = solved.col(j) / quad;
  }
  return out;
}

UntiedLayer to_untied(const LayerParams& layer, const Dictionary& dict, double lam) {
  const Matrix& w = layer.variant == Variant::slista ? dict.atoms() : layer.w;
  if (w.rows() != dict.n_rows() || w.cols() != dict.n_cols()) {
    throw DimensionError("to_untied: W must be n x m");
  }
  UntiedLayer out;
  out.w_x = layer.alpha * w.transpose();
  out.w_z = Matrix::Identity(dict.n_cols(), dict.n_cols()) - out.w_x * dict.atoms();
  out.threshold = layer.threshold_scale() * lam;
  return out;
}

Vector untied_forward(const UntiedLayer& layer, const Vector& z, const Vector& x) {
  if (z.size() != layer.w_z.cols() || x.size() != layer.w_x.cols()) {
    throw DimensionError("untied_forward: z or x has wrong length");
  }
  Vector out = layer.w_x * x + layer.w_z * z;
  soft_threshold_inplace(out, layer.threshold);
  return out;
}

double coupling_metric(const LayerParams& layer, const Dictionary& dict) {
  if (layer.variant == Variant::slista) return 0.0;
  if (layer.w.rows() != dict.n_rows() || layer.w.cols() != dict.n_cols()) {
    throw DimensionError("coupling_metric: W must be n x m");
  }
  return (layer.alpha * layer.w - layer.beta * dict.atoms()).norm();
}

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json doc;
  doc["variant"] = std::string(to_string(net.variant()));
  doc["n_layers"] = net.depth();
  doc["dictionary"] = {{"hash", net.dictionary().hash_hex()},
                       {"n_rows", net.dictionary().n_rows()},
                       {"n_cols", net.dictionary().n_cols()}};
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerParams& layer : net.layers()) {
    nlohmann::json entry;
    entry["alpha"] = layer.alpha;
    entry["beta"] = layer.variant == Variant::slista ? layer.alpha : layer.beta;
    if (layer.variant != Variant::slista) {
      std::vector<double> row_major;
      row_major.reserve(static_cast<std::size_t>(layer.w.size()));
      for (Index i = 0; i < layer.w.rows(); ++i) {
        for (Index j = 0; j < layer.w.cols(); ++j) row_major.push_back(layer.w(i, j));
      }
      entry["w"] = std::move(row_major);
    }
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

Network network_from_json(const nlohmann::json& doc, DictionaryPtr dict) {
  if (!dict) throw std::invalid_argument("network_from_json: null dictionary");
  const Variant variant = variant_from_string(doc.at("variant").get<std::string>());
  const auto& ref = doc.at("dictionary");
  if (ref.at("hash").get<std::string>() != dict->hash_hex()) {
    throw std::invalid_argument("network_from_json: dictionary hash mismatch (file " +
                                ref.at("hash").get<std::string>() + ", given " +
                                dict->hash_hex() + ")");
  }
  const auto& layers_json = doc.at("layers");
  if (doc.at("n_layers").get<std::size_t>() != layers_json.size()) {
    throw std::invalid_argument("network_from_json: n_layers disagrees with layers");
  }
  std::vector<LayerParams> layers;
  for (const auto& entry : layers_json) {
    LayerParams layer;
    layer.variant = variant;
    layer.alpha = entry.at("alpha").get<double>();
    layer.beta = entry.at("beta").get<double>();
    if (variant != Variant::slista) {
      const auto values = entry.at("w").get<std::vector<double>>();
      if (values.size() != static_cast<std::size_t>(dict->n_rows() * dict->n_cols())) {
        throw DimensionError("network_from_json: W has wrong size");
      }
      layer.w.resize(dict->n_rows(), dict->n_cols());
      std::size_t k = 0;
      for (Index i = 0; i < layer.w.rows(); ++i) {
        for (Index j = 0; j < layer.w.cols(); ++j) layer.w(i, j) = values[k++];
      }
    }
    layers.push_back(std::move(layer));
  }
  return Network(std::move(dict), variant, std::move(layers));
}

}  // namespace adaptista
