#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include "adaptista/model.hpp"

namespace adaptista {

/// Symmetric positive-semidefinite operator on R^dim, applied as out = A in.
struct LinearOperator {
  Index dim = 0;
  std::function<void(const Vector& in, Vector& out)> apply;
};

struct PowerIterationOptions {
  int max_iter = 1000;
  double tol = 1e-12;
  std::uint64_t seed = 0x5eedULL;
};

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  /// False when max_iter was reached before the relative change of the
  /// Rayleigh quotient dropped below tol. eigenvalue is still the latest
  /// estimate.
  bool converged = false;
};

/// Largest eigenvalue of a PSD operator by power iteration from a seeded
/// Gaussian start vector.
PowerIterationResult power_iteration(const LinearOperator& op,
                                     const PowerIterationOptions& options = {});

/// Gram operator v -> A^T (A v) of a (sub)matrix A.
LinearOperator gram_operator(const Matrix& a);

/// Memoized support-restricted Lipschitz constants of one dictionary.
/// Not thread-safe; use one instance per worker.
class LipschitzCache {
 public:
  std::optional<double> find(const SupportKey& s);
  void insert(const SupportKey& s, double value);

  /// Binds the cache to a dictionary on first use; throws
  /// std::invalid_argument if later used with a different one.
  void bind(const Dictionary& dict);

  std::size_t size() const noexcept { return entries_.size(); }
  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }
  const std::map<SupportKey, double>& entries() const noexcept { return entries_; }

 private:
  std::map<SupportKey, double> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::optional<std::uint64_t> dict_hash_;
};

/// L_S: largest eigenvalue of D_S^T D_S, computed on the |S| x |S| restricted
/// Gram operator. L_{empty} = L by convention. Values are clamped to L.
double sub_lipschitz(const Dictionary& dict, const SupportKey& s,
                     LipschitzCache& cache,
                     const PowerIterationOptions& options = {});

/// Uncached variant.
double sub_lipschitz(const Dictionary& dict, const SupportKey& s,
                     const PowerIterationOptions& options = {});

/// Asymptotic ratio L_S / L for Gaussian dictionaries with m/n -> gamma and
/// |S|/m -> zeta: ((1 + sqrt(zeta gamma)) / (1 + sqrt(gamma)))^2.
double mp_ratio(double gamma, double zeta);

/// Columns of `atoms` indexed by s.
Matrix restrict_columns(const Matrix& atoms, const SupportKey& s);

}  // namespace adaptista
