#pragma once

#include <cstdint>
#include <random>

#include "ldpkm/geometry.hpp"

namespace ldpkm {

// Random linear map with i.i.d. N(0, 1/d) entries so E||Tx||^2 = ||x||^2.
// When the target dimension is at least the source dimension the map is the
// identity (reducing dimensions upward is pointless).
struct JlMap {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  bool identity = false;
  std::uint64_t seed = 0;
  std::vector<double> entries;  // row-major d_out x d_in

  Point apply(const Point& p) const;
};

std::size_t target_dim(std::size_t k, double alpha, double beta, double c_dim = 1.0);

JlMap sample_jl(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

// Q = P o S o T, optionally followed by the algorithm-2 translation that puts
// images into [0,1)^d (see make_domain_map_alg2).
struct DomainMap {
  JlMap jl;
  double scale = 1.0;
  double projection_radius = 1.0;
  Point shift;               // gamma, empty for algorithm 1
  bool unit_box_embed = false;  // true => output remapped into [0,1)^d
  std::uint64_t seed = 0;

  std::size_t output_dim() const { return jl.d_out; }
};

// Algorithm 1: scale c_s/(alpha sqrt(ln(n/beta))), projection to B(0,1).
DomainMap make_domain_map_alg1(std::size_t d_prime, std::size_t k, double alpha, double beta,
                               std::size_t n, std::uint64_t seed, double c_dim = 1.0,
                               double c_s = 0.8);

// Algorithm 2: scale 1/(2(1+alpha)), projection to B(0,1/2), then translation
// by gamma ~ U[-1/2,1/2]^d. The lattice shift is realized on the data: images
// land in [gamma, 1+gamma] and are affinely embedded into [0,1)^d by
// x -> (x + gamma + 1)/2, which keeps all pairwise distances (up to the
// uniform factor 1/2) instead of folding them across the box boundary.
DomainMap make_domain_map_alg2(std::size_t d_prime, std::size_t k, double alpha, double beta,
                               std::uint64_t seed, double c_dim = 1.0);

Point apply_map(const DomainMap& q, const Point& p);

}  // namespace ldpkm
