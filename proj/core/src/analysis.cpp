#include "adaptista/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "adaptista/csv.hpp"
#include "adaptista/datagen.hpp"

namespace adaptista {

std::vector<double> decile_levels() {
  std::vector<double> levels;
  for (int k = 1; k <= 9; ++k) levels.push_back(k / 10.0);
  return levels;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("nearest_rank_quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("nearest_rank_quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  // Small slack so that e.g. 0.3 * 10 does not round up to rank 4.
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

StepQuantiles step_support_quantiles(const Network& net, const Matrix& samples,
                                     double lam, LipschitzCache& cache,
                                     const std::vector<double>& levels) {
  const Dictionary& dict = net.dictionary();
  const ForwardPass pass = network_forward(net, samples, lam);
  StepQuantiles out;
  for (int t = 0; t < net.depth(); ++t) {
    const Matrix& z = pass.iterates[static_cast<std::size_t>(t)];
    std::vector<double> steps;
    steps.reserve(static_cast<std::size_t>(z.cols()));
    for (Index i = 0; i < z.cols(); ++i) {
      steps.push_back(1.0 / sub_lipschitz(dict, SupportKey::of(z.col(i)), cache));
    }
    QuantileCurve curve{t, levels, {}};
    for (double q : levels) curve.values.push_back(nearest_rank_quantile(steps, q));
    out.curves.push_back(std::move(curve));
    out.learned_steps.push_back(net.layers()[static_cast<std::size_t>(t)].alpha);
  }
  return out;
}

void write_step_quantiles_csv(const StepQuantiles& q, std::ostream& out) {
  out << "layer,learned_step";
  if (!q.curves.empty()) {
    for (double level : q.curves.front().levels) out << ",q" << format_double(level);
  }
  out << '\n';
  for (std::size_t t = 0; t < q.curves.size(); ++t) {
    out << q.curves[t].layer << ',' << format_double(q.learned_steps[t]);
    for (double v : q.curves[t].values) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<double> coupling_decay(const Network& net) {
  if (net.variant() != Variant::lista) {
    throw std::invalid_argument("coupling_decay: requires a LISTA network");
  }
  std::vector<double> out;
  for (const LayerParams& layer : net.layers()) {
    out.push_back(coupling_metric(layer, net.dictionary()));
  }
  return out;
}

int iterations_to_tolerance(const LassoProblem& p, SolverId solver, double gap,
                            double f_star, int max_iter, LipschitzCache& cache) {
  if (!(gap > 0.0)) throw std::invalid_argument("iterations_to_tolerance: gap must be > 0");
  const double resolution = 4.0 * std::numeric_limits<double>::epsilon() *
                            std::max(1.0, std::abs(f_star));
  if (gap < resolution) {
    throw std::invalid_argument("iterations_to_tolerance: gap below achievable precision");
  }
  const double target = f_star + gap;
  const SolverTrace trace = run_solver(solver, p, max_iter, cache, StopRule{target, {}});
  const double last = trace.costs.back();
  return last < target ? trace.iterations() : kBudgetExhausted;
}

int iterations_to_tolerance(const LassoProblem& p, SolverId solver, double gap,
                            double f_star, int max_iter) {
  LipschitzCache cache;
  return iterations_to_tolerance(p, solver, gap, f_star, max_iter, cache);
}

std::vector<MpRow> mp_empirical(Index n, Index m, const std::vector<double>& zetas,
                                int repetitions, const RngSpec& rng) {
  if (repetitions < 1) throw std::invalid_argument("mp_empirical: repetitions must be >= 1");
  const DictionaryPtr dict = gaussian_dictionary(n, m, rng.derive("dictionary"));
  Rng supports(rng.derive("supports"));
  const double gamma = static_cast<double>(m) / static_cast<double>(n);
  std::vector<MpRow> rows;
  for (double zeta : zetas) {
    if (!(zeta >= 0.0 && zeta <= 1.0)) throw std::invalid_argument("mp_empirical: zeta outside [0, 1]");
    const auto k = static_cast<Index>(std::floor(zeta * static_cast<double>(m) + 1e-9));
    double total = 0.0;
    for (int r = 0; r < repetitions; ++r) {
      const auto drawn = supports.sample_without_replacement(m, k);
      const SupportKey s(std::vector<Index>(drawn.begin(), drawn.end()));
      total += sub_lipschitz(*dict, s) / dict->lipschitz();
    }
    rows.push_back({zeta, k, total / repetitions, mp_ratio(gamma, zeta)});
  }
  return rows;
}

void write_mp_csv(const std::vector<MpRow>& rows, std::ostream& out) {
  out << "zeta,support_size,mean_ratio,theory\n";
  for (const MpRow& row : rows) {
    out << format_double(row.zeta) << ',' << row.support_size << ','
        << format_double(row.mean_ratio) << ',' << format_double(row.theory) << '\n';
  }
}

}  // namespace adaptista
