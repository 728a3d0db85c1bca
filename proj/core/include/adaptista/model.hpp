#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adaptista {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when operand shapes disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces a non-finite or otherwise unusable value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorted, duplicate-free set of column indices (0-based).
class SupportKey {
 public:
  SupportKey() = default;
  explicit SupportKey(std::vector<Index> indices);

  /// Indices of the nonzero entries of z (exact comparison with 0).
  static SupportKey of(const Vector& z);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(Index j) const;
  bool is_subset_of(const SupportKey& other) const;

  auto operator<=>(const SupportKey&) const = default;
  bool operator==(const SupportKey&) const = default;

 private:
  std::vector<Index> indices_;
};

/// n x m matrix with unit-norm, pairwise distinct columns and its cached
/// Lipschitz constant L = largest eigenvalue of D^T D.
class Dictionary {
 public:
  /// Columns are rescaled to unit norm. Throws std::invalid_argument on an
  /// empty matrix, non-finite entries, a zero column or duplicated columns
  /// (|D_i^T D_j| within 1e-9 of 1).
  explicit Dictionary(Matrix atoms);

  const Matrix& atoms() const noexcept { return atoms_; }
  Index n_rows() const noexcept { return atoms_.rows(); }
  Index n_cols() const noexcept { return atoms_.cols(); }
  double lipschitz() const noexcept { return lipschitz_; }

  /// FNV-1a digest of the normalized entries; identifies a dictionary in
  /// serialized networks and caches.
  std::uint64_t content_hash() const noexcept { return hash_; }
  std::string hash_hex() const;

 private:
  Matrix atoms_;
  double lipschitz_ = 0.0;
  std::uint64_t hash_ = 0;
};

using DictionaryPtr = std::shared_ptr<const Dictionary>;

inline DictionaryPtr make_dictionary(Matrix atoms) {
  return std::make_shared<const Dictionary>(std::move(atoms));
}

/// min_z 1/2 ||x - D z||^2 + lam ||z||_1
class LassoProblem {
 public:
  /// lam must be finite and strictly positive; x must have n_rows entries.
  LassoProblem(DictionaryPtr dict, Vector x, double lam);

  const Dictionary& dictionary() const noexcept { return *dict_; }
  const DictionaryPtr& dictionary_ptr() const noexcept { return dict_; }
  const Matrix& atoms() const noexcept { return dict_->atoms(); }
  const Vector& x() const noexcept { return x_; }
  double lam() const noexcept { return lam_; }

  /// ||D^T x||_inf: the smallest lam for which z = 0 is optimal.
  double lambda_max() const;

 private:
  DictionaryPtr dict_;
  Vector x_;
  double lam_;
};

struct KktReport {
  double residual = 0.0;
  std::vector<Index> equicorrelation;
  bool satisfied = false;
};

/// sign(v) * max(|v| - u, 0), elementwise. Entries with |v_j| <= u become
/// exact zeros.
Vector soft_threshold(const Vector& v, double u);

/// In-place variant over contiguous storage (a vector or a matrix whose
/// columns are independent samples).
void soft_threshold_inplace(std::span<double> values, double u);

template <typename Derived>
void soft_threshold_inplace(Eigen::PlainObjectBase<Derived>& v, double u) {
  soft_threshold_inplace(std::span<double>(v.data(), static_cast<std::size_t>(v.size())), u);
}

double lasso_cost(const LassoProblem& p, const Vector& z);
double lasso_cost(const Matrix& atoms, const Vector& x, double lam, const Vector& z);

/// Max-norm violation of the optimality conditions
///   D_j^T (x - D z) = lam sign(z_j)      if z_j != 0
///   |D_j^T (x - D z)| <= lam             if z_j == 0
/// and the equicorrelation set { j : | |D_j^T (D z - x)| - lam | <= tol }.
KktReport kkt_check(const LassoProblem& p, const Vector& z, double tol);

/// Quadratic majorizer of the Lasso cost around z_ref with curvature
/// lipschitz_like:
///   1/2||x - D z_ref||^2 + (z - z_ref)^T D^T (D z_ref - x)
///     + lipschitz_like/2 ||z - z_ref||^2 + lam ||z||_1
double surrogate_cost(const LassoProblem& p, const Vector& z,
                      const Vector& z_ref, double lipschitz_like);

/// Default tolerance for declaring a point optimal.
inline constexpr double kDefaultKktTol = 1e-8;

}  // namespace adaptista
