#include <benchmark/benchmark.h>

#include <bandit_hjb/exact_dp.hpp>
#include <bandit_hjb/policies.hpp>
#include <bandit_hjb/rng.hpp>

using namespace bhjb;

static void BM_OneArmedBackwardInduction(benchmark::State& state) {
  const auto n = state.range(0);
  const double nn = static_cast<double>(n);
  std::int64_t states = 0;
  for (auto _ : state) {
    sweep_one_armed_bernoulli(n, {nn, nn - std::sqrt(nn)}, 1.0 / (3.0 * std::sqrt(nn)),
                              BernoulliSupport::pm_gamma, 1.0, [&](const DpRoundView& view) {
                                states += view.layout.states;
                              });
  }
  state.SetItemsProcessed(states);
}
BENCHMARK(BM_OneArmedBackwardInduction)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

static void BM_TwoArmedBackwardInduction(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) {
    const auto table = solve_k_armed(n, {{1, 1}, {2, 1}}, 1.0, BernoulliSupport::zero_one,
                                     {.persist_all = false});
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_TwoArmedBackwardInduction)->Arg(16)->Arg(32);

static void BM_ClosedFormPolicy(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  HistoryState h(K);
  CounterRng rng(1);
  for (int k = 0; k < K; ++k) {
    h.q[static_cast<std::size_t>(k)] = 1 + static_cast<std::int64_t>(rng.next_u64() % 100);
    h.s[static_cast<std::size_t>(k)] = rng.next_double() * static_cast<double>(h.q[k]);
  }
  const std::vector<double> ones(static_cast<std::size_t>(K), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_unregularized(h, 1000, ScalingFactor::sqrt_n(), ones, ones));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ClosedFormPolicy)->Arg(5)->Arg(20)->Arg(100);

static void BM_ThompsonNormal(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  std::vector<NormalParams> posts(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) posts[static_cast<std::size_t>(k)] = {0.01 * k, 1.0 / (k + 1.0)};
  CounterRng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(thompson_normal(posts, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ThompsonNormal)->Arg(5)->Arg(20);

BENCHMARK_MAIN();
