#pragma once

#include <iosfwd>
#include <vector>

#include "adaptista/lipschitz.hpp"
#include "adaptista/networks.hpp"
#include "adaptista/rng.hpp"
#include "adaptista/solvers.hpp"

namespace adaptista {

/// Deciles 0.1 .. 0.9.
std::vector<double> decile_levels();

/// Nearest-rank quantile: the ceil(q N)-th smallest value (q = 0 gives the
/// minimum).
double nearest_rank_quantile(std::vector<double> values, double q);

struct QuantileCurve {
  int layer = 0;
  std::vector<double> levels;
  std::vector<double> values;
};

struct StepQuantiles {
  std::vector<QuantileCurve> curves;  ///< distribution of 1/L_{S(x,t)} per layer
  std::vector<double> learned_steps;  ///< alpha^(t) per layer
};

/// For every layer t and sample x, S(x, t) = supp(z^(t)(x)) (the layer's
/// input) and the step bound 1/L_{S(x,t)}; returns its quantiles per layer.
StepQuantiles step_support_quantiles(const Network& net, const Matrix& samples,
                                     double lam, LipschitzCache& cache,
                                     const std::vector<double>& levels = decile_levels());

void write_step_quantiles_csv(const StepQuantiles& q, std::ostream& out);

/// ||alpha^(t) W^(t) - beta^(t) D||_F for every layer of a LISTA network.
std::vector<double> coupling_decay(const Network& net);

inline constexpr int kBudgetExhausted = -1;

/// First iteration whose cost is below f_star + gap, or kBudgetExhausted if
/// none within max_iter. Throws std::invalid_argument when gap is below the
/// resolution of doubles around f_star.
int iterations_to_tolerance(const LassoProblem& p, SolverId solver, double gap,
                            double f_star, int max_iter, LipschitzCache& cache);
int iterations_to_tolerance(const LassoProblem& p, SolverId solver, double gap,
                            double f_star, int max_iter = 100000);

struct MpRow {
  double zeta = 0.0;
  Index support_size = 0;
  double mean_ratio = 0.0;  ///< mean of L_S / L over repetitions
  double theory = 0.0;      ///< mp_ratio(m / n, zeta)
};

/// One Gaussian n x m dictionary; for each zeta, `repetitions` uniformly
/// random supports of size floor(zeta m). A size-0 support uses L_S = L.
std::vector<MpRow> mp_empirical(Index n, Index m, const std::vector<double>& zetas,
                                int repetitions, const RngSpec& rng);

void write_mp_csv(const std::vector<MpRow>& rows, std::ostream& out);

}  // namespace adaptista
