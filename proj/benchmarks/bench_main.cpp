#include <benchmark/benchmark.h>

#include "metapotts/broadcast.hpp"
#include "metapotts/dynamics.hpp"
#include "metapotts/meanfield.hpp"
#include "metapotts/percolation.hpp"

using namespace metapotts;

static void BM_SampleRegular(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_regular(n, 3, seed++).num_edges());
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleRegular)->Arg(1000)->Arg(100000);

static void BM_GlauberSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MultiGraph g = sample_regular(n, 3, 7);
  const PottsParams p{3, 3, 1.38};
  Glauber chain(g, p);
  ChainState s = ChainState::from(g, Configuration(n, 0), 3);
  Rng rng(11);
  for (auto _ : state) {
    for (int i = 0; i < n; ++i) chain.step(s, rng);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GlauberSweep)->Arg(1000)->Arg(100000);

static void BM_SwendsenWangStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MultiGraph g = sample_regular(n, 3, 7);
  SwendsenWang chain(g, {3, 3, 1.38});
  ChainState s = ChainState::from(g, Configuration(n, 0), 3);
  Rng rng(12);
  for (auto _ : state) chain.step(s, rng);
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SwendsenWangStep)->Arg(1000)->Arg(100000);

static void BM_Percolate(benchmark::State& state) {
  const MultiGraph g = sample_regular(100000, 3, 7);
  Rng rng(13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(percolate(g, {PercolationMode::binomial, 0.7, 0}, rng).sizes.front());
  }
}
BENCHMARK(BM_Percolate);

static void BM_Thresholds(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(thresholds(3, 3).beta_c);
}
BENCHMARK(BM_Thresholds);

static void BM_SolveFixedPoints(benchmark::State& state) {
  const PottsParams p{3, 3, 1.4};
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_points(p).size());
}
BENCHMARK(BM_SolveFixedPoints);

static void BM_NonrecCurve(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const BroadcastSpec spec{{3, 3, 1.2}, ColourDistribution::uniform(3), depth, 100};
  for (auto _ : state) benchmark::DoNotOptimize(nonrec_curve(spec, 5).distance.back());
}
BENCHMARK(BM_NonrecCurve)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
