#pragma once

#include <cstdint>
#include <random>

#include "ldpkm/geometry.hpp"

namespace ldpkm {

struct KMeansConfig {
  std::size_t restarts = 8;
  std::size_t max_iterations = 64;
  double tolerance = 1e-9;  // relative cost improvement below which we stop
  std::uint64_t seed = 1;
};

// Squared-distance weighted seeding over a weighted point set. With fewer
// distinct points than k the remaining centers duplicate existing picks.
CenterSet kmeanspp_seed(const std::vector<Point>& pts, const std::vector<double>& weights,
                        std::size_t k, std::mt19937_64& rng);

// Alternating assign/mean; cost is nonincreasing and asserted so every step.
CenterSet lloyd(const std::vector<Point>& pts, const std::vector<double>& weights,
                CenterSet centers, const KMeansConfig& config);

// Best of `restarts` seeded Lloyd runs by final cost.
CenterSet standard_kmeans(const std::vector<Point>& pts, const std::vector<double>& weights,
                          std::size_t k, const KMeansConfig& config);
CenterSet standard_kmeans(const Dataset& d, std::size_t k, const KMeansConfig& config);

struct BruteForceResult {
  CenterSet centers;
  double cost = 0.0;
};

// Exact optimum by exhaustive partition enumeration. Guarded to n <= 14, k <= 3.
BruteForceResult brute_force_kmeans(const Dataset& d, std::size_t k);

}  // namespace ldpkm
