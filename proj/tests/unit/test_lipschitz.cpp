#include <gtest/gtest.h>

#include <numeric>

#include <adaptista/datagen.hpp>
#include <adaptista/lipschitz.hpp>

#include "oracles.hpp"

using namespace adaptista;

namespace {

LinearOperator dense_operator(const Matrix& a) {
  return LinearOperator{a.rows(), [a](const Vector& in, Vector& out) { out = a * in; }};
}

}  // namespace

TEST(PowerIteration, Identity) {
  const auto r = power_iteration(dense_operator(Matrix::Identity(5, 5)));
  EXPECT_NEAR(r.eigenvalue, 1.0, 1e-10);
  EXPECT_TRUE(r.converged);
}

TEST(PowerIteration, RankOne) {
  Vector v(4);
  v << 1.0, -1.0, 1.0, 1.0;  // norm 2
  const auto r = power_iteration(dense_operator(v * v.transpose()));
  EXPECT_NEAR(r.eigenvalue, 4.0, 1e-8);
}

TEST(PowerIteration, MatchesCharacteristicPolynomialRoot) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(RngSpec{seed, "charpoly"});
    const Matrix a = oracle::gaussian_matrix(6, 8, rng);
    const Matrix g = a.transpose() * a;  // 8 x 8, rank 6
    const double expected = oracle::top_eigenvalue_charpoly(g);
    const double got = power_iteration(dense_operator(g)).eigenvalue;
    EXPECT_NEAR(got, expected, 1e-6 * expected) << "seed " << seed;
  }
}

TEST(PowerIteration, DeterministicForSeed) {
  Rng rng(RngSpec{9, "det"});
  const Matrix a = oracle::gaussian_matrix(5, 5, rng);
  const Matrix g = a.transpose() * a;
  const auto r1 = power_iteration(dense_operator(g), {.max_iter = 7, .tol = 1e-12, .seed = 5});
  const auto r2 = power_iteration(dense_operator(g), {.max_iter = 7, .tol = 1e-12, .seed = 5});
  EXPECT_EQ(r1.eigenvalue, r2.eigenvalue);
  EXPECT_EQ(r1.iterations, r2.iterations);
}

TEST(PowerIteration, NonConvergenceFlagged) {
  // Two nearly equal top eigenvalues need many iterations.
  Vector diag(3);
  diag << 1.0, 0.999999, 0.1;
  const auto r = power_iteration(dense_operator(diag.asDiagonal()), {.max_iter = 3});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_GT(r.eigenvalue, 0.5);
}

TEST(PowerIteration, ErrorsAndZeroOperator) {
  EXPECT_THROW(power_iteration(LinearOperator{0, [](const Vector&, Vector&) {}}),
               std::invalid_argument);
  const LinearOperator bad{3, [](const Vector&, Vector& out) { out = Vector::Zero(2); }};
  EXPECT_THROW(power_iteration(bad), DimensionError);
  EXPECT_THROW(power_iteration(dense_operator(Matrix::Identity(2, 2)), {.max_iter = 0}),
               std::invalid_argument);
  EXPECT_THROW(power_iteration(dense_operator(Matrix::Identity(2, 2)), {.tol = 0.0}),
               std::invalid_argument);
  EXPECT_EQ(power_iteration(dense_operator(Matrix::Zero(3, 3))).eigenvalue, 0.0);
}

TEST(SubLipschitz, Conventions) {
  auto d = gaussian_dictionary(10, 30, RngSpec{1, "subl"});
  LipschitzCache cache;
  EXPECT_EQ(sub_lipschitz(*d, SupportKey(), cache), d->lipschitz());
  EXPECT_NEAR(sub_lipschitz(*d, SupportKey({7}), cache), 1.0, 1e-10);
  std::vector<Index> all(30);
  std::iota(all.begin(), all.end(), Index{0});
  EXPECT_NEAR(sub_lipschitz(*d, SupportKey(all), cache), d->lipschitz(), 1e-8);
  EXPECT_THROW(sub_lipschitz(*d, SupportKey({30}), cache), std::out_of_range);
}

TEST(SubLipschitz, MatchesDenseEigenvalue) {
  auto d = gaussian_dictionary(10, 30, RngSpec{2, "subl-dense"});
  Rng rng(RngSpec{2, "supports"});
  for (int trial = 0; trial < 30; ++trial) {
    const auto drawn = rng.sample_without_replacement(30, 2 + static_cast<Index>(rng.below(15)));
    const SupportKey s(std::vector<Index>(drawn.begin(), drawn.end()));
    const Matrix ds = restrict_columns(d->atoms(), s);
    const double dense =
        Eigen::SelfAdjointEigenSolver<Matrix>(ds.transpose() * ds).eigenvalues().maxCoeff();
    EXPECT_NEAR(sub_lipschitz(*d, s), std::min(dense, d->lipschitz()), 1e-9 * dense);
  }
}

TEST(SubLipschitz, MonotoneUnderInclusion) {
  auto d = gaussian_dictionary(10, 40, RngSpec{3, "mono"});
  Rng rng(RngSpec{3, "order"});
  const auto order = rng.sample_without_replacement(40, 40);
  LipschitzCache cache;
  double prev = 0.0;
  std::vector<Index> grow;
  for (auto j : order) {
    grow.push_back(j);
    const double v = sub_lipschitz(*d, SupportKey(grow), cache);
    EXPECT_LE(prev, v + 1e-9);
    EXPECT_LE(v, d->lipschitz() + 1e-9);
    prev = v;
  }
}

TEST(LipschitzCache, HitsMissesAndAgreement) {
  auto d = gaussian_dictionary(8, 16, RngSpec{4, "cache"});
  LipschitzCache cache;
  const SupportKey s({1, 5, 9});
  const double first = sub_lipschitz(*d, s, cache);
  const double second = sub_lipschitz(*d, s, cache);
  EXPECT_EQ(first, second);
  EXPECT_NEAR(first, sub_lipschitz(*d, s), 1e-12);
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_EQ(cache.misses(), 1u);
  EXPECT_EQ(cache.size(), 1u);
  for (const auto& [key, value] : cache.entries()) EXPECT_LE(value, d->lipschitz() + 1e-9);
}

TEST(LipschitzCache, RefusesSecondDictionary) {
  auto a = gaussian_dictionary(8, 16, RngSpec{5, "a"});
  auto b = gaussian_dictionary(8, 16, RngSpec{5, "b"});
  LipschitzCache cache;
  sub_lipschitz(*a, SupportKey({0, 1}), cache);
  EXPECT_THROW(sub_lipschitz(*b, SupportKey({0, 1}), cache), std::invalid_argument);
}

TEST(MpRatio, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(mp_ratio(3.0, 1.0), 1.0);
  EXPECT_NEAR(mp_ratio(3.0, 0.0), 1.0 / std::pow(1.0 + std::sqrt(3.0), 2), 1e-15);
  EXPECT_NEAR(mp_ratio(3.0, 0.0), 0.1340, 5e-5);
  EXPECT_NEAR(mp_ratio(3.0, 0.25), 0.4665, 5e-5);
  EXPECT_THROW(mp_ratio(3.0, 1.5), std::invalid_argument);
  EXPECT_THROW(mp_ratio(3.0, -0.1), std::invalid_argument);
  EXPECT_THROW(mp_ratio(0.0, 0.5), std::invalid_argument);
}

TEST(RestrictColumns, PicksColumnsInOrder) {
  Matrix a(2, 4);
  a << 1, 2, 3, 4,
       5, 6, 7, 8;
  const Matrix r = restrict_columns(a, SupportKey({3, 1}));
  ASSERT_EQ(r.cols(), 2);
  EXPECT_EQ(r(0, 0), 2);
  EXPECT_EQ(r(1, 1), 8);
}
