#include "ldpkm/grids.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "ldpkm/common.hpp"

namespace ldpkm {

double grid_unit(std::size_t level, std::size_t levels, double alpha, std::size_t dim) {
  require(level >= 1 && level <= levels, "grid_unit: level out of range");
  require(alpha > 0.0, "grid_unit: alpha must be positive");
  double exp2term = std::ldexp(1.0, static_cast<int>(level) - static_cast<int>(levels) + 1);
  return alpha * exp2term / std::sqrt(static_cast<double>(dim));
}

GridSpec make_grid_spec(std::size_t level, std::size_t levels, double alpha, std::size_t dim) {
  GridSpec s;
  s.level = level;
  s.levels = levels;
  s.alpha = alpha;
  s.dim = dim;
  s.unit = grid_unit(level, levels, alpha, dim);
  return s;
}

GridPoint floor_to_grid(const Point& p, const GridSpec& spec) {
  require(p.size() == spec.dim, "floor_to_grid: dimension mismatch");
  GridPoint g;
  g.level = spec.level;
  g.coords.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(std::isfinite(p[i]), "floor_to_grid: non-finite coordinate");
    g.coords[i] = static_cast<std::int64_t>(std::floor(p[i] / spec.unit));
  }
  return g;
}

Point grid_decode(const GridPoint& g, const GridSpec& spec) {
  require(g.level == spec.level, "grid_decode: level mismatch");
  Point p(g.coords.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = spec.unit * static_cast<double>(g.coords[i]);
  return p;
}

GridPoint coarsen(const GridPoint& g, const GridSpec& from, const GridSpec& to) {
  require(to.level >= from.level, "coarsen: target level must not be finer");
  if (to.level == from.level) return g;
  // Unit lengths double per level, so the coordinate shift is exact.
  int shift = static_cast<int>(to.level - from.level);
  GridPoint out;
  out.level = to.level;
  out.coords.resize(g.coords.size());
  for (std::size_t i = 0; i < g.coords.size(); ++i) {
    // Arithmetic right shift == floor division by 2^shift for negatives too.
    out.coords[i] = g.coords[i] >> shift;
  }
  return out;
}

std::string grid_key(const GridPoint& g) {
  std::string out = std::to_string(g.level);
  out += ':';
  for (std::size_t i = 0; i < g.coords.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(g.coords[i]);
  }
  return out;
}

std::optional<GridPoint> grid_parse(const std::string& key) {
  GridPoint g;
  const char* s = key.c_str();
  char* end = nullptr;
  long lvl = std::strtol(s, &end, 10);
  if (end == s || *end != ':' || lvl < 0) return std::nullopt;
  g.level = static_cast<std::size_t>(lvl);
  s = end + 1;
  while (*s) {
    long long c = std::strtoll(s, &end, 10);
    if (end == s) return std::nullopt;
    g.coords.push_back(c);
    s = (*end == ',') ? end + 1 : end;
    if (*end != ',' && *end != '\0') return std::nullopt;
  }
  if (g.coords.empty()) return std::nullopt;
  return g;
}

}  // namespace ldpkm
