#include "ldpkm/dimred.hpp"

#include <cmath>

#include "ldpkm/common.hpp"

namespace ldpkm {

Point JlMap::apply(const Point& p) const {
  require(p.size() == d_in, "JlMap: input dimension mismatch");
  if (identity) return p;
  Point out(d_out, 0.0);
  for (std::size_t r = 0; r < d_out; ++r) {
    const double* row = &entries[r * d_in];
    double acc = 0.0;
    for (std::size_t c = 0; c < d_in; ++c) acc += row[c] * p[c];
    out[r] = acc;
  }
  return out;
}

std::size_t target_dim(std::size_t k, double alpha, double beta, double c_dim) {
  require(alpha > 0.0 && alpha <= 0.5, "target_dim: alpha must be in (0, 1/2]");
  require(beta > 0.0 && beta < 1.0, "target_dim: beta must be in (0, 1)");
  double d = c_dim * std::log(static_cast<double>(k) / (alpha * beta)) / (alpha * alpha);
  return static_cast<std::size_t>(std::ceil(std::max(d, 1.0)));
}

JlMap sample_jl(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
  JlMap map;
  map.d_in = d_in;
  map.seed = seed;
  if (d_out >= d_in) {
    map.d_out = d_in;
    map.identity = true;
    return map;
  }
  map.d_out = d_out;
  map.entries.resize(d_out * d_in);
  auto rng = make_rng(seed, "jl-entries");
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(d_out)));
  for (double& e : map.entries) e = g(rng);
  return map;
}

DomainMap make_domain_map_alg1(std::size_t d_prime, std::size_t k, double alpha, double beta,
                               std::size_t n, std::uint64_t seed, double c_dim, double c_s) {
  DomainMap q;
  q.seed = seed;
  std::size_t d = target_dim(k, alpha, beta, c_dim);
  q.jl = sample_jl(d_prime, d, mix2(seed, fnv1a("jl")));
  q.scale = c_s / (alpha * std::sqrt(std::log(static_cast<double>(n) / beta)));
  q.projection_radius = 1.0;
  q.unit_box_embed = false;
  return q;
}

DomainMap make_domain_map_alg2(std::size_t d_prime, std::size_t k, double alpha, double beta,
                               std::uint64_t seed, double c_dim) {
  DomainMap q;
  q.seed = seed;
  std::size_t d = target_dim(k, alpha, beta, c_dim);
  q.jl = sample_jl(d_prime, d, mix2(seed, fnv1a("jl")));
  q.scale = 1.0 / (2.0 * (1.0 + alpha));
  q.projection_radius = 0.5;
  q.unit_box_embed = true;
  q.shift.resize(q.jl.d_out);
  auto rng = make_rng(seed, "gamma-shift");
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& g : q.shift) g = u(rng);
  return q;
}

Point apply_map(const DomainMap& q, const Point& p) {
  Point y = q.jl.apply(p);
  for (double& v : y) v *= q.scale;
  y = project_to_ball(std::move(y), q.projection_radius);
  if (q.unit_box_embed) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      double x = (y[i] + q.shift[i] + 1.0) * 0.5;
      // Closed upper endpoint can only occur for projected outliers.
      if (x >= 1.0) x = std::nextafter(1.0, 0.0);
      if (x < 0.0) x = 0.0;
      y[i] = x;
    }
  }
  return y;
}

}  // namespace ldpkm
