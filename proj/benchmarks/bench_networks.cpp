#include <benchmark/benchmark.h>

#include <adaptista/datagen.hpp>
#include <adaptista/networks.hpp>

using namespace adaptista;

namespace {

struct Setup {
  DictionaryPtr dict;
  Matrix x;
};

Setup setup(Index samples) {
  const RngSpec base{0, "bench-net"};
  auto d = gaussian_dictionary(32, 128, base.derive("dictionary"));
  return {d, equiregularization_samples(*d, samples, base.derive("x"))};
}

void BM_Forward(benchmark::State& state) {
  const Setup s = setup(1000);
  const Network net = Network::ista_initialized(s.dict, static_cast<Variant>(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(network_forward(net, s.x, 0.1).output().data());
  state.SetLabel(std::string(to_string(net.variant())));
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const Setup s = setup(1000);
  const Network net = Network::ista_initialized(s.dict, static_cast<Variant>(state.range(0)), 20);
  for (auto _ : state) {
    const ForwardPass pass = network_forward(net, s.x, 0.1);
    benchmark::DoNotOptimize(network_backward(net, s.x, 0.1, pass).squared_norm());
  }
  state.SetLabel(std::string(to_string(net.variant())));
}
BENCHMARK(BM_ForwardBackward)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
