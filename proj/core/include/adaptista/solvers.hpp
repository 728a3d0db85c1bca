#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "adaptista/lipschitz.hpp"
#include "adaptista/model.hpp"

namespace adaptista {

/// Per-iteration record of a solver run. Index t of costs/supports refers to
/// the iterate z^(t) (t = 0 is the zero start), index t of steps and
/// star_accepted to the transition z^(t) -> z^(t+1).
struct SolverTrace {
  std::vector<double> costs;
  std::vector<double> steps;
  std::vector<SupportKey> supports;
  /// Condition (support of the large-step proposal stays inside the current
  /// support); filled by oista only.
  std::vector<bool> star_accepted;
  /// First t such that supports[t..] are all equal.
  std::optional<int> support_id_iter;
  Vector final_z;

  int iterations() const noexcept { return static_cast<int>(steps.size()); }
};

/// Early-stop conditions, checked on every iterate including z^(0).
struct StopRule {
  std::optional<double> cost_below;  ///< stop once cost < value
  std::optional<double> kkt_tol;     ///< stop once kkt residual <= value
};

struct RateEstimate {
  double mu_star = 0.0;        ///< smallest eigenvalue of D_S^T D_S
  double l_star = 0.0;         ///< L_S
  double linear_factor = 1.0;  ///< 1 - mu_star / l_star
};

enum class SolverId { ista, fista, oista };

std::string_view to_string(SolverId id);
SolverId solver_from_string(std::string_view name);

/// ST(z - alpha D^T (D z - x), alpha lam)
Vector ista_step(const LassoProblem& p, const Vector& z, double alpha);

/// Proximal gradient with constant step 1/L from z = 0.
SolverTrace ista(const LassoProblem& p, int n_iter, const StopRule& stop = {});

/// Nesterov-accelerated ISTA (t_1 = 1, t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2),
/// without restarts.
SolverTrace fista(const LassoProblem& p, int n_iter, const StopRule& stop = {});

/// Oracle-ISTA: at each iterate with support S, try the step 1/L_S and keep it
/// if the result is supported in S, otherwise take the plain 1/L step.
SolverTrace oista(const LassoProblem& p, int n_iter, LipschitzCache& cache,
                  const StopRule& stop = {});

SolverTrace run_solver(SolverId id, const LassoProblem& p, int n_iter,
                       LipschitzCache& cache, const StopRule& stop = {});

/// Local linear-rate constants on a fixed support. mu_star is obtained by
/// inverse power iteration on D_S^T D_S, and is 0 when that matrix is
/// singular.
RateEstimate rate_estimate(const Dictionary& dict, const SupportKey& s_star,
                           LipschitzCache& cache);
RateEstimate rate_estimate(const Dictionary& dict, const SupportKey& s_star);

/// Reference optimal value F*, from a long ISTA run.
inline constexpr int kReferenceIstaIterations = 10000;
double reference_optimum(const LassoProblem& p,
                         int n_iter = kReferenceIstaIterations);

/// Batched ISTA for many inputs (columns of x) sharing a dictionary. Returns
/// the final codes (columns) and fills costs with the per-sample final cost.
Matrix ista_batch(const Dictionary& dict, const Matrix& x, double lam,
                  int n_iter, Vector* costs = nullptr);

/// F* for every column of x.
Vector reference_optima(const Dictionary& dict, const Matrix& x, double lam,
                        int n_iter = kReferenceIstaIterations);

/// CSV with header iter,cost,step,support_size,star_accepted. The final row
/// has empty step/star_accepted fields (no transition leaves it).
void write_trace_csv(const SolverTrace& trace, std::ostream& out);

}  // namespace adaptista
