#include <benchmark/benchmark.h>

#include <bandit_hjb/hjb_solver.hpp>

using namespace bhjb;

namespace {

LimitModel one_armed_model(ScalingFactor f) {
  return one_armed_bernoulli_limit(PowerSeq{1, 0, 0, 0, 0}, PowerSeq{1, -1, 0, 0, 0},
                                   PowerSeq::constant(1.0), PowerSeq{0, 0, 0, 1.0 / 3.0, 0}, f);
}

}  // namespace

static void BM_DiffusiveSweep(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto model = one_armed_model(ScalingFactor::sqrt_n());
  GridSpec g;
  g.N_t = N;
  g.N_q = N;
  g.S = 4.0;
  g.N_s = static_cast<int>(std::floor(g.S * std::sqrt(static_cast<double>(N))));
  std::int64_t nodes = 0;
  for (auto _ : state) {
    HjbSweeper sweep(model, g, Scheme::diffusive);
    while (!sweep.done()) {
      sweep.step();
      nodes += sweep.nodes_per_slice();
    }
    benchmark::DoNotOptimize(sweep.values().data());
  }
  state.SetItemsProcessed(nodes);
}
BENCHMARK(BM_DiffusiveSweep)->Arg(50)->Arg(100)->Arg(200);

static void BM_UpwindSweep(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto model = one_armed_model(ScalingFactor::linear_n());
  const GridSpec g = GridSpec::make(N, N, 1.0);
  std::int64_t nodes = 0;
  for (auto _ : state) {
    HjbSweeper sweep(model, g, Scheme::deterministic);
    while (!sweep.done()) {
      sweep.step();
      nodes += sweep.nodes_per_slice();
    }
    benchmark::DoNotOptimize(sweep.values().data());
  }
  state.SetItemsProcessed(nodes);
}
BENCHMARK(BM_UpwindSweep)->Arg(64)->Arg(128)->Arg(256);

static void BM_RegularizedSweep(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto model = one_armed_model(ScalingFactor::sqrt_n());
  GridSpec g;
  g.N_t = N;
  g.N_q = N;
  g.S = 4.0;
  g.N_s = static_cast<int>(std::floor(g.S * std::sqrt(static_cast<double>(N))));
  for (auto _ : state) {
    HjbSweeper sweep(model, g, Scheme::diffusive, 0.5);
    while (!sweep.done()) sweep.step();
    benchmark::DoNotOptimize(sweep.values().data());
  }
}
BENCHMARK(BM_RegularizedSweep)->Arg(50)->Arg(100);

BENCHMARK_MAIN();
