#pragma once

#include <cstdint>
#include <map>

#include "ldpkm/dimred.hpp"
#include "ldpkm/freq.hpp"
#include "ldpkm/geometry.hpp"
#include "ldpkm/grids.hpp"
#include "ldpkm/kmeans.hpp"
#include "ldpkm/privacy.hpp"
#include "ldpkm/protocol.hpp"

namespace ldpkm {

struct Alg1Params {
  std::size_t k = 2;
  double epsilon = 1.0;
  double delta = 1e-6;
  double alpha = 0.3;
  double beta = 0.05;
  std::size_t n = 0;
  std::size_t levels = 1;        // L = ceil(lg n)
  std::size_t ng_cap = 0;        // N_G (config cap, default 20k)
  std::size_t greedy_picks = 0;  // ceil(2 N_G ln(1/alpha))
  BudgetScheme budgets;
  std::uint64_t seed = 1;
  bool noiseless = false;
  double c_dim = 1.0;
  double c_s = 0.8;
  std::size_t histogram_buckets = 2048;
  KMeansConfig kmeans;
};

Alg1Params make_alg1_params(std::size_t k, double epsilon, double delta, double alpha, double beta,
                            std::size_t n, std::uint64_t seed);

// Per-level analyzer state after the proxy construction.
struct PickedPoint {
  GridPoint g;
  double adjusted_count = 0.0;  // Count(g) after maximal-set subtraction
  Point adjusted_sum;           // Sum(g), original-space vector
  double raw_count = 0.0;       // PH estimate cached for maximal-set bookkeeping
  Point raw_sum;                // PSO estimate cached likewise
  double query_count = 1.0;     // sum-oracle queries folded into adjusted_sum
};

struct LevelState {
  std::size_t level = 0;
  std::vector<PickedPoint> picked;  // G_l^*
};

struct Alg1Interaction {
  DomainMap map;
  std::vector<SuccinctHistogram> histograms;  // PH^l at index l-1
  std::vector<SumOracle> oracles;             // PSO^l at index l-1
  std::vector<Point> reduced_points;          // Q(p) per agent (simulation-side)
};

Alg1Interaction run_interaction(const std::vector<Agent>& agents, const DomainMap& map,
                                const Alg1Params& params, AgentLedgerSet* ledger, RoundLog& log);

struct Alg1Proxy {
  std::vector<LevelState> levels;
  CenterSet proxy;  // D*: picked grid points (reduced space) weighted by clamped Count
  std::vector<std::string> warnings;
};

Alg1Proxy build_proxy(const Alg1Interaction& interaction, const Alg1Params& params);

struct Alg1Recovery {
  CenterSet centers;  // S' in the original space
  CenterSet reduced_centers;  // S* (for diagnostics)
  std::vector<std::string> warnings;
};

Alg1Recovery recover_centers(const Alg1Proxy& proxy, const Alg1Interaction& interaction,
                             const Alg1Params& params, std::size_t original_dim);

struct Alg1Result {
  CenterSet centers;
  CostReport report;
  Alg1Proxy proxy;
  DomainMap map;
  RoundLog log;
  std::vector<SuccinctHistogram> histograms;  // PH^l, retained for artifacts
};

Alg1Result one_round_kmeans(const std::vector<Agent>& agents, const Alg1Params& params,
                            AgentLedgerSet* ledger);

}  // namespace ldpkm
