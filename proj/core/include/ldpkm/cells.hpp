#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ldpkm/geometry.hpp"

namespace ldpkm {

class SuccinctHistogram;  // freq.hpp

// Dyadic cell on [0,1)^d: level l, integer corner j in {0..2^l-1}^d,
// box prod_e [j_e/2^l, (j_e+1)/2^l), side length 2^-l.
struct CellId {
  std::size_t level = 0;
  std::vector<std::int64_t> coords;

  bool operator==(const CellId& o) const { return level == o.level && coords == o.coords; }
  bool operator<(const CellId& o) const {
    if (level != o.level) return level < o.level;
    return coords < o.coords;
  }
};

struct CellIdHash {
  std::size_t operator()(const CellId& c) const;
};

double cell_side(std::size_t level);

CellId cell_of(const Point& p, std::size_t level);

// Ancestor i levels up; levels above the root clamp to the root cell.
CellId ancestor(const CellId& c, std::size_t i);

// Anc* = ancestor ceil(1.5 lg d) levels up (side length ~ d^{3/2} t_l).
std::size_t anc_star_levels(std::size_t dim);
CellId anc_star(const CellId& c, std::size_t dim);

Point cell_center(const CellId& c);

std::string cell_key(const CellId& c);
std::optional<CellId> cell_parse(const std::string& key);

// ---------------------------------------------------------------------------
// Heavy/light marking per OPT guess. Stored sparsely: only cells that appear
// in the histograms (plus forced root) exist in memory.
// ---------------------------------------------------------------------------
struct CellLabels {
  double opt_guess = 0.0;
  std::size_t levels = 0;  // L; marking covers levels 0..L-1
  std::size_t dim = 0;
  std::vector<std::unordered_set<CellId, CellIdHash>> heavy;  // index = level

  bool is_heavy(const CellId& c) const;
  // Light cell with heavy parent ("medium"): the LSH participants.
  bool is_medium(const CellId& c) const;
  std::vector<CellId> heavy_at(std::size_t level) const;  // sorted
};

struct HeavyMarkerParams {
  double beta = 0.05;
  std::size_t k = 2;
  double d_power = 0.0;  // exponent on d in the threshold numerator
  double heavy_cap_constant = 8.0;  // warn threshold multiplier on kL/beta
};

// Marks heavy/light per level from the round-1 cell histograms. Histogram for
// level l sits at histograms[l-1] (levels 1..L-1 are marked from data; the
// root is always heavy, the bottom level always light).
CellLabels mark_heavy_light(const std::vector<SuccinctHistogram>& histograms, double opt_guess,
                            std::size_t k, double beta, std::size_t levels, std::size_t dim,
                            const HeavyMarkerParams& params, std::vector<std::string>* warnings);

double heavy_threshold(double opt_guess, std::size_t level, std::size_t k, double beta,
                       std::size_t levels, std::size_t dim, double d_power);

}  // namespace ldpkm
