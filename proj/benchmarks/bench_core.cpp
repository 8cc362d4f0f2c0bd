#include <benchmark/benchmark.h>

#include "ldpkm/harness.hpp"
#include "ldpkm/kmeans.hpp"

using namespace ldpkm;

static Dataset bench_data(std::size_t n, std::size_t d) {
  return gen_gaussian_mixture(n, d, 5, 0.4, 0.03, 11);
}

static void BM_ClusteringCost(benchmark::State& state) {
  Dataset d = bench_data(static_cast<std::size_t>(state.range(0)), 10);
  KMeansConfig cfg;
  cfg.restarts = 1;
  cfg.seed = 3;
  CenterSet s = standard_kmeans(d, 5, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clustering_cost(d, s));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClusteringCost)->Range(1 << 10, 1 << 16)->Complexity();

static void BM_LloydIteration(benchmark::State& state) {
  Dataset d = bench_data(static_cast<std::size_t>(state.range(0)), 10);
  KMeansConfig cfg;
  cfg.restarts = 1;
  cfg.max_iterations = 1;
  cfg.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(standard_kmeans(d, 5, cfg));
  }
}
BENCHMARK(BM_LloydIteration)->Range(1 << 10, 1 << 14);

BENCHMARK_MAIN();
