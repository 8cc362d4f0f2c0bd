#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldpkm/geometry.hpp"

namespace ldpkm {

// Flooring grids for the one-round algorithm. Level l has unit length
// t_l = alpha * 2^{l-L+1} / sqrt(d), so the snap distance t_l * sqrt(d)
// equals alpha * r_l for the squared-distance thresholds r_l = 2^{l-L+1}.
struct GridSpec {
  std::size_t level = 1;   // l in [1, L]
  std::size_t levels = 1;  // L
  double alpha = 0.3;
  std::size_t dim = 1;
  double unit = 0.0;  // t_l
};

struct GridPoint {
  std::size_t level = 0;
  std::vector<std::int64_t> coords;

  bool operator==(const GridPoint& o) const { return level == o.level && coords == o.coords; }
};

double grid_unit(std::size_t level, std::size_t levels, double alpha, std::size_t dim);

GridSpec make_grid_spec(std::size_t level, std::size_t levels, double alpha, std::size_t dim);

GridPoint floor_to_grid(const Point& p, const GridSpec& spec);

Point grid_decode(const GridPoint& g, const GridSpec& spec);

// Flooring the decoded point into a coarser level; equals flooring the
// original point there (cross-level consistency).
GridPoint coarsen(const GridPoint& g, const GridSpec& from, const GridSpec& to);

// Canonical histogram key "l:c1,c2,...".
std::string grid_key(const GridPoint& g);
std::optional<GridPoint> grid_parse(const std::string& key);

}  // namespace ldpkm
