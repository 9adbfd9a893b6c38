#include <benchmark/benchmark.h>

#include "odp/dp_core.hpp"
#include "odp/hedge_component.hpp"
#include "odp/hedge_expanded.hpp"
#include "odp/problems.hpp"

namespace {

std::vector<double> random_weights(std::size_t n, odp::Rng& rng) {
  std::vector<double> w(n);
  for (double& x : w) x = 0.05 + odp::uniform01(rng);
  return w;
}

void BM_WeightPush(benchmark::State& state) {
  const auto bst = odp::build_bst({static_cast<int>(state.range(0))});
  odp::Rng rng(1);
  const auto w_hat = random_weights(bst.dag.num_multiedges(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(odp::weight_push(bst.dag, w_hat));
  state.counters["multiedges"] = static_cast<double>(bst.dag.num_multiedges());
}
BENCHMARK(BM_WeightPush)->Arg(5)->Arg(10)->Arg(20)->Arg(40);

void BM_EhSample(benchmark::State& state) {
  const auto bst = odp::build_bst({static_cast<int>(state.range(0))});
  const auto w = odp::eh_init(bst.dag);
  odp::Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(odp::eh_sample(w, rng));
}
BENCHMARK(BM_EhSample)->Arg(5)->Arg(20);

void BM_Projection(benchmark::State& state) {
  const auto bst = odp::build_bst({static_cast<int>(state.range(0))});
  odp::Rng rng(3);
  const auto w_hat = random_weights(bst.dag.num_edges(), rng);
  std::size_t cycles = 0;
  for (auto _ : state) {
    const auto r = odp::project_kflow(bst.dag, w_hat);
    cycles = r.cycles;
    benchmark::DoNotOptimize(r);
  }
  state.counters["sweeps"] = static_cast<double>(cycles);
}
BENCHMARK(BM_Projection)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const auto bst = odp::build_bst({static_cast<int>(state.range(0))});
  const auto w = odp::ch_init(bst.dag).w;
  for (auto _ : state) benchmark::DoNotOptimize(odp::decompose(bst.dag, w));
}
BENCHMARK(BM_Decompose)->Arg(5)->Arg(10)->Arg(20);

void BM_SolveMinSum(benchmark::State& state) {
  const auto rod = odp::build_rod({static_cast<int>(state.range(0))});
  odp::Rng rng(4);
  const auto loss = random_weights(rod.dag.num_edges(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(odp::solve_min_sum_edges(rod.dag, loss));
  state.counters["edges"] = static_cast<double>(rod.dag.num_edges());
}
BENCHMARK(BM_SolveMinSum)->Arg(10)->Arg(50)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
