#include <benchmark/benchmark.h>

#include "ldpkm/common.hpp"
#include "ldpkm/freq.hpp"
#include "ldpkm/privacy.hpp"

using namespace ldpkm;

static std::vector<std::string> planted_values(std::size_t n) {
  std::vector<std::string> values;
  values.reserve(n);
  auto rng = make_rng(77, "bench-values");
  std::uniform_int_distribution<std::uint64_t> uni(0, (1ULL << 20) - 1);
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(i % 4 == 0 ? "123456" : std::to_string(uni(rng)));
  }
  return values;
}

static void BM_BitstogramRound(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> values = planted_values(n);
  U64Codec codec(20);
  for (auto _ : state) {
    AgentLedgerSet ledger(n, {1.0, 0.0});
    BitstogramOptions opts;
    opts.epsilon = 1.0;
    opts.seed = 5;
    opts.private_seed = 6;
    opts.codec = &codec;
    benchmark::DoNotOptimize(bitstogram_round(values, &ledger, opts));
  }
}
BENCHMARK(BM_BitstogramRound)->Range(1 << 12, 1 << 15)->Unit(benchmark::kMillisecond);

static void BM_SumOracleQuery(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> values = planted_values(n);
  std::vector<Point> g(n, Point(8, 0.1));
  AgentLedgerSet ledger(n, {1.0, 1e-5});
  SumOracleOptions opts;
  opts.epsilon = 1.0;
  opts.delta = 1e-5;
  opts.seed = 5;
  opts.private_seed = 6;
  SumOracle oracle = heavy_sums_round(values, g, 2.0, 2.0, &ledger, opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.query("123456"));
  }
}
BENCHMARK(BM_SumOracleQuery)->Range(1 << 12, 1 << 15)->Unit(benchmark::kMillisecond);
