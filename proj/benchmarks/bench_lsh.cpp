#include <benchmark/benchmark.h>

#include "ldpkm/common.hpp"
#include "ldpkm/lsh.hpp"

using namespace ldpkm;

static void BM_LshHash(benchmark::State& state) {
  CollisionProfile profile = tune_t(static_cast<double>(state.range(0)), 3.0);
  LshFunction fn(profile, 32, 1.0, 9, "(1,1,1,0)");
  auto rng = make_rng(4, "bench-lsh");
  std::normal_distribution<double> g(0.0, 1.0);
  Point x(32);
  for (double& v : x) v = g(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fn.hash(x));
  }
}
BENCHMARK(BM_LshHash)->Arg(10)->Arg(100)->Arg(1000);

static void BM_TuneT(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(tune_t(static_cast<double>(state.range(0)), 2.0));
  }
}
BENCHMARK(BM_TuneT)->Arg(10)->Arg(1000);
