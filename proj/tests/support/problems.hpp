#pragma once

// Problem builders shared by the unit and acceptance tests.

#include <cmath>
#include <stdexcept>

#include <adaptista/datagen.hpp>
#include <adaptista/model.hpp>
#include <adaptista/solvers.hpp>

#include "oracles.hpp"

namespace fixtures {

using namespace adaptista;

inline LassoProblem random_problem(Index n, Index m, double lam, const RngSpec& spec) {
  auto dict = gaussian_dictionary(n, m, spec.derive("dictionary"));
  Matrix x = equiregularization_samples(*dict, 1, spec.derive("x"));
  return LassoProblem(dict, x.col(0), lam);
}

// Problem whose optimal support S = {0, .., k-1} has orthonormal atoms.
// x = D_S c with |c_i| > lam gives z*_S = c - lam sign(c), and the remaining
// columns are redrawn until |D_j^T D_S sign(c)| <= margin < 1, which keeps
// them strictly inactive.
struct OrthogonalSupportProblem {
  LassoProblem problem;
  Vector z_star;
  SupportKey support;
  double f_star;
};

inline OrthogonalSupportProblem orthogonal_support_problem(Index n, Index m, Index k, double lam,
                                                           const RngSpec& spec,
                                                           double margin = 0.8) {
  Rng rng(spec);
  Matrix d(n, m);
  d.leftCols(k) = oracle::orthonormal_columns(n, k, rng);
  Vector c(k);
  for (Index i = 0; i < k; ++i) {
    const double mag = lam + 0.2 + rng.uniform();
    c[i] = rng.uniform() < 0.5 ? -mag : mag;
  }
  const Vector signs = c.array().sign();
  const Vector dir = d.leftCols(k) * signs;
  for (Index j = k; j < m; ++j) {
    for (int tries = 0;; ++tries) {
      if (tries > 10000) throw std::runtime_error("orthogonal_support_problem: cannot place column");
      Vector g = oracle::gaussian_vector(n, rng);
      g.normalize();
      if (std::abs(g.dot(dir)) <= margin) {
        d.col(j) = g;
        break;
      }
    }
  }
  auto dict = make_dictionary(d);
  Vector x = dict->atoms().leftCols(k) * c;
  Vector z = Vector::Zero(m);
  z.head(k) = c - lam * signs;
  std::vector<Index> idx;
  for (Index i = 0; i < k; ++i) idx.push_back(i);
  LassoProblem p(dict, x, lam);
  const double f_star = lasso_cost(p, z);
  return {std::move(p), std::move(z), SupportKey(std::move(idx)), f_star};
}

// Square orthonormal dictionary.
inline DictionaryPtr orthonormal_dictionary(Index n, const RngSpec& spec) {
  Rng rng(spec);
  return make_dictionary(oracle::orthonormal_columns(n, n, rng));
}

}  // namespace fixtures
