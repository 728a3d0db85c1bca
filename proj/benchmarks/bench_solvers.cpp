#include <benchmark/benchmark.h>

#include <adaptista/datagen.hpp>
#include <adaptista/lipschitz.hpp>
#include <adaptista/solvers.hpp>

using namespace adaptista;

namespace {

LassoProblem problem(Index n, Index m, double lam) {
  const RngSpec base{0, "bench"};
  auto d = gaussian_dictionary(n, m, base.derive("dictionary"));
  return LassoProblem(d, equiregularization_samples(*d, 1, base.derive("x")).col(0), lam);
}

void BM_Ista(benchmark::State& state) {
  const LassoProblem p = problem(state.range(0), 2 * state.range(0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(ista(p, 100).final_z.data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Ista)->Arg(10)->Arg(100)->Arg(200);

void BM_Fista(benchmark::State& state) {
  const LassoProblem p = problem(state.range(0), 2 * state.range(0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(fista(p, 100).final_z.data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Fista)->Arg(10)->Arg(100)->Arg(200);

// Warm cache: the steady-state cost of an OISTA iteration.
void BM_OistaWarmCache(benchmark::State& state) {
  const LassoProblem p = problem(state.range(0), 2 * state.range(0), 0.5);
  LipschitzCache cache;
  oista(p, 100, cache);
  for (auto _ : state) benchmark::DoNotOptimize(oista(p, 100, cache).final_z.data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_OistaWarmCache)->Arg(10)->Arg(100)->Arg(200);

void BM_OistaColdCache(benchmark::State& state) {
  const LassoProblem p = problem(state.range(0), 2 * state.range(0), 0.5);
  for (auto _ : state) {
    LipschitzCache cache;
    benchmark::DoNotOptimize(oista(p, 100, cache).final_z.data());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_OistaColdCache)->Arg(10)->Arg(100)->Arg(200);

void BM_PowerIterationGram(benchmark::State& state) {
  const Index n = state.range(0);
  auto d = gaussian_dictionary(n, 3 * n, RngSpec{1, "bench-power"});
  const LinearOperator op = gram_operator(d->atoms());
  for (auto _ : state) benchmark::DoNotOptimize(power_iteration(op).eigenvalue);
}
BENCHMARK(BM_PowerIterationGram)->Arg(50)->Arg(200);

void BM_SubLipschitz(benchmark::State& state) {
  auto d = gaussian_dictionary(200, 600, RngSpec{2, "bench-sub"});
  Rng rng(RngSpec{2, "bench-sub-s"});
  const auto drawn = rng.sample_without_replacement(600, state.range(0));
  const SupportKey s(std::vector<Index>(drawn.begin(), drawn.end()));
  for (auto _ : state) benchmark::DoNotOptimize(sub_lipschitz(*d, s));
}
BENCHMARK(BM_SubLipschitz)->Arg(10)->Arg(60)->Arg(300);

}  // namespace
