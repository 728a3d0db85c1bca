#include "adaptista/solvers.hpp"

#include <cmath>
#include <ostream>

#include "adaptista/csv.hpp"
#include "adaptista/rng.hpp"

namespace adaptista {

namespace {

// Residual, gradient and cost at one iterate; shared by the step proposals.
struct Linearization {
  Vector residual;  // D z - x
  Vector gradient;  // D^T (D z - x)
  double cost = 0.0;

  void update(const LassoProblem& p, const Vector& z) {
    residual.noalias() = p.atoms() * z;
    residual -= p.x();
    gradient.noalias() = p.atoms().transpose() * residual;
    cost = 0.5 * residual.squaredNorm() + p.lam() * z.lpNorm<1>();
  }
};

Vector prox_step(const Vector& z, const Vector& gradient, double alpha, double lam) {
  Vector out = z - alpha * gradient;
  soft_threshold_inplace(out, alpha * lam);
  return out;
}

bool should_stop(const StopRule& stop, const LassoProblem& p, const Vector& z,
                 double cost) {
  if (stop.cost_below && cost < *stop.cost_below) return true;
  if (stop.kkt_tol && kkt_check(p, z, *stop.kkt_tol).satisfied) return true;
  return false;
}

void require_iterations(int n_iter) {
  if (n_iter < 0) throw std::invalid_argument("solver: n_iter must be >= 0");
}

void finalize(SolverTrace& trace, Vector z) {
  const int last = static_cast<int>(trace.supports.size()) - 1;
  int first_stable = last;
  while (first_stable > 0 && trace.supports[first_stable - 1] == trace.supports[last]) {
    --first_stable;
  }
  trace.support_id_iter = first_stable;
  trace.final_z = std::move(z);
}

}  // namespace

std::string_view to_string(SolverId id) {
  switch (id) {
    case SolverId::ista: return "ista";
    case SolverId::fista: return "fista";
    case SolverId::oista: return "oista";
  }
  return "?";
}

SolverId solver_from_string(std::string_view name) {
  if (name == "ista") return SolverId::ista;
  if (name == "fista") return SolverId::fista;
  if (name == "oista") return SolverId::oista;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

Vector ista_step(const LassoProblem& p, const Vector& z, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("ista_step: alpha must be > 0");
  if (z.size() != p.dictionary().n_cols()) {
    throw DimensionError("ista_step: z has wrong length");
  }
  Linearization lin;
  lin.update(p, z);
  return prox_step(z, lin.gradient, alpha, p.lam());
}

SolverTrace ista(const LassoProblem& p, int n_iter, const StopRule& stop) {
  require_iterations(n_iter);
  const double alpha = 1.0 / p.dictionary().lipschitz();
  SolverTrace trace;
  Vector z = Vector::Zero(p.dictionary().n_cols());
  Linearization lin;
  lin.update(p, z);
  trace.costs.push_back(lin.cost);
  trace.supports.push_back(SupportKey::of(z));
  for (int t = 0; t < n_iter && !should_stop(stop, p, z, lin.cost); ++t) {
    z = prox_step(z, lin.gradient, alpha, p.lam());
    lin.update(p, z);
    trace.steps.push_back(alpha);
    trace.costs.push_back(lin.cost);
    trace.supports.push_back(SupportKey::of(z));
  }
  finalize(trace, std::move(z));
  return trace;
}

SolverTrace fista(const LassoProblem& p, int n_iter, const StopRule& stop) {
  require_iterations(n_iter);
  const double alpha = 1.0 / p.dictionary().lipschitz();
  SolverTrace trace;
  Vector z = Vector::Zero(p.dictionary().n_cols());
  Vector y = z;
  double momentum = 1.0;
  Linearization at_z, at_y;
  at_z.update(p, z);
  trace.costs.push_back(at_z.cost);
  trace.supports.push_back(SupportKey::of(z));
  for (int t = 0; t < n_iter && !should_stop(stop, p, z, at_z.cost); ++t) {
    at_y.update(p, y);
    Vector next = prox_step(y, at_y.gradient, alpha, p.lam());
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / next_momentum) * (next - z);
    momentum = next_momentum;
    z = std::move(next);
    at_z.update(p, z);
    trace.steps.push_back(alpha);
    trace.costs.push_back(at_z.cost);
    trace.supports.push_back(SupportKey::of(z));
  }
  finalize(trace, std::move(z));
  return trace;
}

SolverTrace oista(const LassoProblem& p, int n_iter, LipschitzCache& cache,
                  const StopRule& stop) {
  require_iterations(n_iter);
  const Dictionary& dict = p.dictionary();
  const double small_step = 1.0 / dict.lipschitz();
  SolverTrace trace;
  Vector z = Vector::Zero(dict.n_cols());
  Linearization lin;
  lin.update(p, z);
  SupportKey support = SupportKey::of(z);
  trace.costs.push_back(lin.cost);
  trace.supports.push_back(support);
  for (int t = 0; t < n_iter && !should_stop(stop, p, z, lin.cost); ++t) {
    const double large_step = 1.0 / sub_lipschitz(dict, support, cache);
    Vector proposal = prox_step(z, lin.gradient, large_step, p.lam());
    SupportKey proposal_support = SupportKey::of(proposal);
    const bool accepted = proposal_support.is_subset_of(support);
    if (accepted) {
      z = std::move(proposal);
      support = std::move(proposal_support);
      trace.steps.push_back(large_step);
    } else {
      z = prox_step(z, lin.gradient, small_step, p.lam());
      support = SupportKey::of(z);
      trace.steps.push_back(small_step);
    }
    trace.star_accepted.push_back(accepted);
    lin.update(p, z);
    trace.costs.push_back(lin.cost);
    trace.supports.push_back(support);
  }
  finalize(trace, std::move(z));
  return trace;
}

SolverTrace run_solver(SolverId id, const LassoProblem& p, int n_iter,
                       LipschitzCache& cache, const StopRule& stop) {
  switch (id) {
    case SolverId::ista: return ista(p, n_iter, stop);
    case SolverId::fista: return fista(p, n_iter, stop);
    case SolverId::oista: return oista(p, n_iter, cache, stop);
  }
  throw std::invalid_argument("run_solver: unknown solver");
}

RateEstimate rate_estimate(const Dictionary& dict, const SupportKey& s_star,
                           LipschitzCache& cache) {
  if (s_star.empty()) throw std::invalid_argument("rate_estimate: empty support");
  RateEstimate est;
  est.l_star = sub_lipschitz(dict, s_star, cache);
  const Matrix restricted = restrict_columns(dict.atoms(), s_star);
  const Index k = restricted.cols();
  if (k <= restricted.rows()) {
    const Matrix gram = restricted.transpose() * restricted;
    const Eigen::LDLT<Matrix> factor(gram);
    const double min_pivot = factor.vectorD().cwiseAbs().minCoeff();
    if (factor.info() == Eigen::Success && factor.isPositive() &&
        min_pivot > 1e-13 * est.l_star) {
      Rng rng(RngSpec{0x5eedULL, "inverse-power-iteration"});
      Vector v(k);
      for (Index i = 0; i < k; ++i) v[i] = rng.normal();
      v.normalize();
      double previous = 0.0;
      for (int it = 0; it < 10000; ++it) {
        Vector w = factor.solve(v);
        v = w.normalized();
        const double rayleigh = v.dot(gram * v);
        est.mu_star = rayleigh;
        if (it > 0 && std::abs(rayleigh - previous) < 1e-14 * est.l_star) break;
        previous = rayleigh;
      }
      est.mu_star = std::clamp(est.mu_star, 0.0, est.l_star);
    }
  }
  est.linear_factor = 1.0 - est.mu_star / est.l_star;
  return est;
}

RateEstimate rate_estimate(const Dictionary& dict, const SupportKey& s_star) {
  LipschitzCache cache;
  return rate_estimate(dict, s_star, cache);
}

double reference_optimum(const LassoProblem& p, int n_iter) {
  return ista(p, n_iter).costs.back();
}

Matrix ista_batch(const Dictionary& dict, const Matrix& x, double lam,
                  int n_iter, Vector* costs) {
  if (x.rows() != dict.n_rows()) {
    throw DimensionError("ista_batch: samples have wrong dimension");
  }
  const Matrix& d = dict.atoms();
  const double alpha = 1.0 / dict.lipschitz();
  Matrix z = Matrix::Zero(dict.n_cols(), x.cols());
  Matrix residual(x.rows(), x.cols());
  for (int t = 0; t < n_iter; ++t) {
    residual.noalias() = d * z;
    residual -= x;
    z.noalias() -= alpha * (d.transpose() * residual);
    soft_threshold_inplace(z, alpha * lam);
  }
  if (costs) {
    residual.noalias() = d * z;
    residual -= x;
    costs->resize(x.cols());
    for (Index i = 0; i < x.cols(); ++i) {
      (*costs)[i] = 0.5 * residual.col(i).squaredNorm() + lam * z.col(i).lpNorm<1>();
    }
  }
  return z;
}

Vector reference_optima(const Dictionary& dict, const Matrix& x, double lam,
                        int n_iter) {
  Vector costs;
  ista_batch(dict, x, lam, n_iter, &costs);
  return costs;
}

void write_trace_csv(const SolverTrace& trace, std::ostream& out) {
  out << "iter,cost,step,support_size,star_accepted\n";
  const std::size_t rows = trace.costs.size();
  for (std::size_t t = 0; t < rows; ++t) {
    out << t << ',' << format_double(trace.costs[t]) << ',';
    if (t < trace.steps.size()) out << format_double(trace.steps[t]);
    out << ',' << trace.supports[t].size() << ',';
    if (t < trace.star_accepted.size()) out << (trace.star_accepted[t] ? 1 : 0);
    out << '\n';
  }
}

}  // namespace adaptista
