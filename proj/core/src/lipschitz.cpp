#include "adaptista/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adaptista/rng.hpp"

namespace adaptista {

PowerIterationResult power_iteration(const LinearOperator& op,
                                     const PowerIterationOptions& options) {
  if (op.dim < 1) throw std::invalid_argument("power_iteration: dim must be >= 1");
  if (options.max_iter < 1) {
    throw std::invalid_argument("power_iteration: max_iter must be >= 1");
  }
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("power_iteration: tol must be > 0");
  }

  Rng rng(RngSpec{options.seed, "power-iteration"});
  Vector v(op.dim);
  for (Index i = 0; i < op.dim; ++i) v[i] = rng.normal();
  v.normalize();

  Vector w(op.dim);
  PowerIterationResult result;
  double previous = 0.0;
  for (int k = 1; k <= options.max_iter; ++k) {
    op.apply(v, w);
    if (w.size() != op.dim) {
      std::ostringstream msg;
      msg << "power_iteration: operator returned length " << w.size()
          << ", expected " << op.dim;
      throw DimensionError(msg.str());
    }
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    result.eigenvalue = rayleigh;
    result.iterations = k;
    if (norm == 0.0) {
      result.eigenvalue = 0.0;
      result.converged = true;
      return result;
    }
    if (k > 1 && std::abs(rayleigh - previous) < options.tol * std::abs(rayleigh)) {
      result.converged = true;
      return result;
    }
    previous = rayleigh;
    v = w / norm;
  }
  return result;
}

LinearOperator gram_operator(const Matrix& a) {
  // The operator owns a copy so it can outlive the caller's matrix.
  auto shared = std::make_shared<const Matrix>(a);
  return LinearOperator{a.cols(), [shared](const Vector& in, Vector& out) {
                          out.noalias() = shared->transpose() * (*shared * in);
                        }};
}

Matrix restrict_columns(const Matrix& atoms, const SupportKey& s) {
  Matrix out(atoms.rows(), static_cast<Index>(s.size()));
  Index k = 0;
  for (Index j : s.indices()) {
    if (j < 0 || j >= atoms.cols()) {
      throw std::out_of_range("support index " + std::to_string(j) +
                              " outside [0, " + std::to_string(atoms.cols()) + ")");
    }
    out.col(k++) = atoms.col(j);
  }
  return out;
}

std::optional<double> LipschitzCache::find(const SupportKey& s) {
  auto it = entries_.find(s);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void LipschitzCache::insert(const SupportKey& s, double value) {
  entries_.insert_or_assign(s, value);
}

void LipschitzCache::bind(const Dictionary& dict) {
  if (!dict_hash_) {
    dict_hash_ = dict.content_hash();
  } else if (*dict_hash_ != dict.content_hash()) {
    throw std::invalid_argument("LipschitzCache: bound to a different dictionary");
  }
}

double sub_lipschitz(const Dictionary& dict, const SupportKey& s,
                     const PowerIterationOptions& options) {
  if (s.empty()) return dict.lipschitz();
  const Matrix restricted = restrict_columns(dict.atoms(), s);
  const LinearOperator op{restricted.cols(), [&restricted](const Vector& in, Vector& out) {
                            out.noalias() = restricted.transpose() * (restricted * in);
                          }};
  const double value = power_iteration(op, options).eigenvalue;
  // Interlacing gives L_S <= L; both are lower estimates, keep them ordered.
  return std::min(value, dict.lipschitz());
}

double sub_lipschitz(const Dictionary& dict, const SupportKey& s,
                     LipschitzCache& cache, const PowerIterationOptions& options) {
  if (s.empty()) return dict.lipschitz();
  cache.bind(dict);
  if (auto hit = cache.find(s)) return *hit;
  const double value = sub_lipschitz(dict, s, options);
  cache.insert(s, value);
  return value;
}

double mp_ratio(double gamma, double zeta) {
  if (!(gamma > 0.0)) throw std::invalid_argument("mp_ratio: gamma must be > 0");
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::invalid_argument("mp_ratio: zeta must lie in [0, 1]");
  }
  const double ratio = (1.0 + std::sqrt(zeta * gamma)) / (1.0 + std::sqrt(gamma));
  return ratio * ratio;
}

}  // namespace adaptista
