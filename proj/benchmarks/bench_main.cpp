#include <benchmark/benchmark.h>

#include "mallows/permutation.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/rng.hpp"
#include "mallows/sampler.hpp"

namespace {

using namespace mallows;

void BM_SampleFinite(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double q = static_cast<double>(state.range(1)) / 100.0;
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_finite(n, q, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleFinite)->ArgsProduct({{1000, 100000}, {50, 200}});

void BM_Inversions(benchmark::State& state) {
  RngStream rng(2, 0);
  const auto w = sample_finite(static_cast<std::size_t>(state.range(0)), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(inversions(w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Inversions)->Arg(1000)->Arg(100000);

void BM_CycleCounts(benchmark::State& state) {
  RngStream rng(3, 0);
  const auto w = sample_finite(static_cast<std::size_t>(state.range(0)), 0.9, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cycle_counts(w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CycleCounts)->Arg(100000);

void BM_Excursions(benchmark::State& state) {
  RngStream rng(4, 0);
  const double q = static_cast<double>(state.range(0)) / 100.0;
  std::size_t points = 0;
  for (auto _ : state) {
    for_each_excursion(q, 1000, rng, [&](const Excursion& e) { points += e.length(); });
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(points));
}
BENCHMARK(BM_Excursions)->Arg(50)->Arg(70);

void BM_PairReturns(benchmark::State& state) {
  RngStream rng(5, 0);
  for (auto _ : state) benchmark::DoNotOptimize(pair_chain_return_times(0.5, 1000, rng));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PairReturns);

void BM_DecomposeAntiadditive(benchmark::State& state) {
  RngStream rng(6, 0);
  const auto w = sample_finite(static_cast<std::size_t>(state.range(0)), 2.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(decompose_antiadditive(w));
}
BENCHMARK(BM_DecomposeAntiadditive)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
