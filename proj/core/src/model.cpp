#include "adaptista/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "adaptista/lipschitz.hpp"
#include "adaptista/rng.hpp"

namespace adaptista {

namespace {

constexpr double kDuplicateTol = 1e-9;

void require_length(const Vector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    std::ostringstream msg;
    msg << what << ": expected length " << expected << ", got " << v.size();
    throw DimensionError(msg.str());
  }
}

}  // namespace

SupportKey::SupportKey(std::vector<Index> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

SupportKey SupportKey::of(const Vector& z) {
  SupportKey key;
  for (Index j = 0; j < z.size(); ++j) {
    if (z[j] != 0.0) key.indices_.push_back(j);
  }
  return key;
}

bool SupportKey::contains(Index j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

bool SupportKey::is_subset_of(const SupportKey& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  if (atoms_.rows() == 0 || atoms_.cols() == 0) {
    throw std::invalid_argument("Dictionary: matrix must be non-empty");
  }
  if (!atoms_.allFinite()) {
    throw std::invalid_argument("Dictionary: entries must be finite");
  }
  for (Index j = 0; j < atoms_.cols(); ++j) {
    const double norm = atoms_.col(j).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("Dictionary: column " + std::to_string(j) +
                                  " is zero");
    }
    atoms_.col(j) /= norm;
  }
  const Matrix gram = atoms_.transpose() * atoms_;
  for (Index j = 0; j < gram.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (std::abs(gram(i, j)) >= 1.0 - kDuplicateTol) {
        throw std::invalid_argument("Dictionary: columns " + std::to_string(i) +
                                    " and " + std::to_string(j) +
                                    " are duplicated");
      }
    }
  }
  lipschitz_ = power_iteration(gram_operator(atoms_)).eigenvalue;
  // Each unit column puts a 1 on the diagonal of D^T D.
  lipschitz_ = std::max(lipschitz_, 1.0);
  hash_ = fnv1a64(atoms_.data(),
                  static_cast<std::size_t>(atoms_.size()) * sizeof(double));
  const Index dims[2] = {atoms_.rows(), atoms_.cols()};
  hash_ = fnv1a64(dims, sizeof(dims), hash_);
}

std::string Dictionary::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash_));
  return buf;
}

LassoProblem::LassoProblem(DictionaryPtr dict, Vector x, double lam)
    : dict_(std::move(dict)), x_(std::move(x)), lam_(lam) {
  if (!dict_) throw std::invalid_argument("LassoProblem: null dictionary");
  require_length(x_, dict_->n_rows(), "LassoProblem x");
  if (!std::isfinite(lam_) || lam_ <= 0.0) {
    throw std::invalid_argument("LassoProblem: lam must be finite and > 0");
  }
}

double LassoProblem::lambda_max() const {
  return (atoms().transpose() * x_).lpNorm<Eigen::Infinity>();
}

Vector soft_threshold(const Vector& v, double u) {
  if (u < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  Vector out = v;
  soft_threshold_inplace(out, u);
  return out;
}

void soft_threshold_inplace(std::span<double> values, double u) {
  if (u < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  for (double& a : values) {
    a = a > u ? a - u : (a < -u ? a + u : 0.0);
  }
}

double lasso_cost(const Matrix& atoms, const Vector& x, double lam,
                  const Vector& z) {
  require_length(x, atoms.rows(), "lasso_cost x");
  require_length(z, atoms.cols(), "lasso_cost z");
  const Vector residual = x - atoms * z;
  return 0.5 * residual.squaredNorm() + lam * z.lpNorm<1>();
}

double lasso_cost(const LassoProblem& p, const Vector& z) {
  return lasso_cost(p.atoms(), p.x(), p.lam(), z);
}

KktReport kkt_check(const LassoProblem& p, const Vector& z, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("kkt_check: tol must be > 0");
  require_length(z, p.dictionary().n_cols(), "kkt_check z");
  const Vector corr = p.atoms().transpose() * (p.x() - p.atoms() * z);
  const double lam = p.lam();
  KktReport report;
  for (Index j = 0; j < z.size(); ++j) {
    double violation;
    if (z[j] != 0.0) {
      violation = std::abs(corr[j] - lam * (z[j] > 0.0 ? 1.0 : -1.0));
    } else {
      violation = std::max(0.0, std::abs(corr[j]) - lam);
    }
    report.residual = std::max(report.residual, violation);
    if (std::abs(std::abs(corr[j]) - lam) <= tol) {
      report.equicorrelation.push_back(j);
    }
  }
  report.satisfied = report.residual <= tol;
  return report;
}

double surrogate_cost(const LassoProblem& p, const Vector& z,
                      const Vector& z_ref, double lipschitz_like) {
  if (!(lipschitz_like > 0.0)) {
    throw std::invalid_argument("surrogate_cost: curvature must be > 0");
  }
  require_length(z, p.dictionary().n_cols(), "surrogate_cost z");
  require_length(z_ref, p.dictionary().n_cols(), "surrogate_cost z_ref");
  const Vector residual = p.atoms() * z_ref - p.x();
  const Vector delta = z - z_ref;
  return 0.5 * residual.squaredNorm() +
         delta.dot(p.atoms().transpose() * residual) +
         0.5 * lipschitz_like * delta.squaredNorm() + p.lam() * z.lpNorm<1>();
}

}  // namespace adaptista
