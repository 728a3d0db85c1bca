#include <gtest/gtest.h>

#include <sstream>

#include <adaptista/analysis.hpp>
#include <adaptista/datagen.hpp>
#include <adaptista/training.hpp>

#include "problems.hpp"

using namespace adaptista;

TEST(Quantiles, NearestRank) {
  const std::vector<double> v{5, 1, 4, 2, 3, 10, 9, 8, 7, 6};
  EXPECT_EQ(nearest_rank_quantile(v, 0.0), 1);
  EXPECT_EQ(nearest_rank_quantile(v, 0.1), 1);
  EXPECT_EQ(nearest_rank_quantile(v, 0.3), 3);
  EXPECT_EQ(nearest_rank_quantile(v, 0.35), 4);
  EXPECT_EQ(nearest_rank_quantile(v, 1.0), 10);
  EXPECT_THROW(nearest_rank_quantile({}, 0.5), std::invalid_argument);
  EXPECT_THROW(nearest_rank_quantile(v, 1.5), std::invalid_argument);
  EXPECT_EQ(decile_levels().size(), 9u);
}

TEST(StepQuantiles, UntrainedNetworkConventions) {
  auto d = gaussian_dictionary(10, 20, RngSpec{1, "steps"});
  const Matrix x = equiregularization_samples(*d, 100, RngSpec{1, "x"});
  const Network net = Network::ista_initialized(d, Variant::slista, 6);
  LipschitzCache cache;
  const StepQuantiles q = step_support_quantiles(net, x, 0.2, cache);
  ASSERT_EQ(q.curves.size(), 6u);
  for (double s : q.learned_steps) EXPECT_EQ(s, 1.0 / d->lipschitz());
  for (double v : q.curves[0].values) EXPECT_EQ(v, 1.0 / d->lipschitz());
  for (const QuantileCurve& c : q.curves) {
    for (std::size_t k = 1; k < c.values.size(); ++k) EXPECT_LE(c.values[k - 1], c.values[k]);
    for (double v : c.values) EXPECT_GE(v, 1.0 / d->lipschitz() - 1e-15);
  }
  std::ostringstream out;
  write_step_quantiles_csv(q, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "layer,learned_step,q0.1,q0.2,q0.3,q0.4,q0.5,q0.6,q0.7,q0.8,q0.9");
}

TEST(CouplingDecay, Examples) {
  auto d = gaussian_dictionary(6, 12, RngSpec{2, "coupling"});
  const Network ista_net = Network::ista_initialized(d, Variant::lista, 4);
  for (double v : coupling_decay(ista_net)) EXPECT_EQ(v, 0.0);
  const double inv_l = 1.0 / d->lipschitz();
  const LayerParams layer{Variant::lista, d->atoms(), 2 * inv_l, inv_l};
  const Network one(d, Variant::lista, {layer});
  const auto values = coupling_decay(one);
  ASSERT_EQ(values.size(), 1u);
  EXPECT_EQ(values[0], coupling_metric(layer, *d));
  EXPECT_THROW(coupling_decay(Network::ista_initialized(d, Variant::slista, 2)),
               std::invalid_argument);
}

TEST(IterationsToTolerance, OrthonormalIstaIsOne) {
  auto d = fixtures::orthonormal_dictionary(8, RngSpec{3, "ortho"});
  Rng rng(RngSpec{3, "x"});
  for (int trial = 0; trial < 5; ++trial) {
    const LassoProblem p(d, oracle::gaussian_vector(8, rng), 0.3);
    const Vector z = soft_threshold(d->atoms().transpose() * p.x(), 0.3);
    EXPECT_EQ(iterations_to_tolerance(p, SolverId::ista, 1e-13, lasso_cost(p, z)), 1);
  }
}

TEST(IterationsToTolerance, MonotoneInGapAndBudget) {
  auto p = fixtures::random_problem(10, 30, 0.5, RngSpec{4, "itt"});
  const double f_star = lasso_cost(p, ista(p, 200000, StopRule{{}, 1e-13}).final_z);
  for (SolverId id : {SolverId::ista, SolverId::fista, SolverId::oista}) {
    int previous = std::numeric_limits<int>::max();
    for (double gap : {1e-13, 1e-10, 1e-7, 1e-4, 1e-1}) {
      const int k = iterations_to_tolerance(p, id, gap, f_star, 100000);
      ASSERT_NE(k, kBudgetExhausted) << to_string(id) << " gap " << gap;
      EXPECT_LE(k, previous);
      previous = k;
    }
  }
  EXPECT_EQ(iterations_to_tolerance(p, SolverId::ista, 1e-13, f_star, 3), kBudgetExhausted);
  EXPECT_THROW(iterations_to_tolerance(p, SolverId::ista, 0.0, f_star), std::invalid_argument);
  EXPECT_THROW(iterations_to_tolerance(p, SolverId::ista, 1e-18, f_star), std::invalid_argument);
}

TEST(IterationsToTolerance, OistaNoSlowerOnSmallProblems) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = fixtures::random_problem(10, 50, 0.5, RngSpec{seed, "itt-small"});
    const SolverTrace ref = ista(p, 400000, StopRule{{}, 1e-14});
    const double f_star = ref.costs.back();
    LipschitzCache cache;
    const int k_ista = iterations_to_tolerance(p, SolverId::ista, 1e-13, f_star, 400000, cache);
    const int k_oista = iterations_to_tolerance(p, SolverId::oista, 1e-13, f_star, 400000, cache);
    ASSERT_NE(k_ista, kBudgetExhausted);
    ASSERT_NE(k_oista, kBudgetExhausted);
    EXPECT_LE(k_oista, k_ista) << "seed " << seed;
  }
}

TEST(MpEmpirical, ConventionsAndReproducibility) {
  const auto rows = mp_empirical(40, 120, {1.0 / 120.0, 0.5, 1.0}, 3, RngSpec{5, "mp"});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].support_size, 1);
  auto d = gaussian_dictionary(40, 120, RngSpec{5, "mp"}.derive("dictionary"));
  EXPECT_NEAR(rows[0].mean_ratio, 1.0 / d->lipschitz(), 1e-10);
  EXPECT_EQ(rows[2].support_size, 120);
  EXPECT_NEAR(rows[2].mean_ratio, 1.0, 1e-8);
  const auto again = mp_empirical(40, 120, {1.0 / 120.0, 0.5, 1.0}, 3, RngSpec{5, "mp"});
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].mean_ratio, again[i].mean_ratio);
  EXPECT_THROW(mp_empirical(40, 120, {1.2}, 3, RngSpec{5, "mp"}), std::invalid_argument);
  EXPECT_THROW(mp_empirical(40, 120, {0.5}, 0, RngSpec{5, "mp"}), std::invalid_argument);
  std::ostringstream out;
  write_mp_csv(rows, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "zeta,support_size,mean_ratio,theory");
}
