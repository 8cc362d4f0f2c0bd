#include "ldpkm/cells.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ldpkm/common.hpp"
#include "ldpkm/freq.hpp"

namespace ldpkm {

std::size_t CellIdHash::operator()(const CellId& c) const {
  std::uint64_t h = mix2(0x9d8f3c1bULL, c.level);
  for (std::int64_t v : c.coords) h = mix2(h, static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

double cell_side(std::size_t level) { return std::ldexp(1.0, -static_cast<int>(level)); }

CellId cell_of(const Point& p, std::size_t level) {
  CellId c;
  c.level = level;
  c.coords.resize(p.size());
  double scale = std::ldexp(1.0, static_cast<int>(level));
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] >= 0.0 && p[i] < 1.0, "cell_of: point outside [0,1)^d");
    c.coords[i] = static_cast<std::int64_t>(std::floor(p[i] * scale));
  }
  return c;
}

CellId ancestor(const CellId& c, std::size_t i) {
  if (i == 0) return c;
  CellId out;
  if (i >= c.level) {
    // Clamp to the root cell.
    out.level = 0;
    out.coords.assign(c.coords.size(), 0);
    return out;
  }
  out.level = c.level - i;
  out.coords.resize(c.coords.size());
  for (std::size_t e = 0; e < c.coords.size(); ++e) out.coords[e] = c.coords[e] >> i;
  return out;
}

std::size_t anc_star_levels(std::size_t dim) {
  if (dim <= 1) return 1;
  return static_cast<std::size_t>(std::ceil(1.5 * std::log2(static_cast<double>(dim))));
}

CellId anc_star(const CellId& c, std::size_t dim) { return ancestor(c, anc_star_levels(dim)); }

Point cell_center(const CellId& c) {
  Point p(c.coords.size());
  double side = cell_side(c.level);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = (static_cast<double>(c.coords[i]) + 0.5) * side;
  }
  return p;
}

std::string cell_key(const CellId& c) {
  std::string out = std::to_string(c.level);
  out += ':';
  for (std::size_t i = 0; i < c.coords.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(c.coords[i]);
  }
  return out;
}

std::optional<CellId> cell_parse(const std::string& key) {
  CellId c;
  const char* s = key.c_str();
  char* end = nullptr;
  long lvl = std::strtol(s, &end, 10);
  if (end == s || *end != ':' || lvl < 0) return std::nullopt;
  c.level = static_cast<std::size_t>(lvl);
  s = end + 1;
  std::int64_t box = static_cast<std::int64_t>(1) << std::min<std::size_t>(c.level, 62);
  while (*s) {
    long long v = std::strtoll(s, &end, 10);
    if (end == s) return std::nullopt;
    if (v < 0 || v >= box) return std::nullopt;
    c.coords.push_back(v);
    s = (*end == ',') ? end + 1 : end;
    if (*end != ',' && *end != '\0') return std::nullopt;
  }
  if (c.coords.empty()) return std::nullopt;
  return c;
}

bool CellLabels::is_heavy(const CellId& c) const {
  if (c.level >= heavy.size()) return false;
  return heavy[c.level].count(c) > 0;
}

bool CellLabels::is_medium(const CellId& c) const {
  if (c.level == 0 || c.level >= levels) return false;
  return !is_heavy(c) && is_heavy(ancestor(c, 1));
}

std::vector<CellId> CellLabels::heavy_at(std::size_t level) const {
  std::vector<CellId> out;
  if (level < heavy.size()) out.assign(heavy[level].begin(), heavy[level].end());
  std::sort(out.begin(), out.end());
  return out;
}

double heavy_threshold(double opt_guess, std::size_t level, std::size_t k, double beta,
                       std::size_t levels, std::size_t dim, double d_power) {
  double t = cell_side(level);
  double d = static_cast<double>(dim);
  return beta * std::pow(d, d_power) * opt_guess /
         (t * t * static_cast<double>(k) * static_cast<double>(levels) * d);
}

CellLabels mark_heavy_light(const std::vector<SuccinctHistogram>& histograms, double opt_guess,
                            std::size_t k, double beta, std::size_t levels, std::size_t dim,
                            const HeavyMarkerParams& params, std::vector<std::string>* warnings) {
  require(levels >= 2, "mark_heavy_light: need at least two levels");
  require(histograms.size() + 1 >= levels, "mark_heavy_light: missing level histogram");
  require(opt_guess > 0.0, "mark_heavy_light: opt guess must be positive");

  CellLabels labels;
  labels.opt_guess = opt_guess;
  labels.levels = levels;
  labels.dim = dim;
  labels.heavy.resize(levels);

  // Root is always heavy.
  CellId root;
  root.level = 0;
  root.coords.assign(dim, 0);
  labels.heavy[0].insert(root);

  // Bottom level L-1 forced light, so marking runs over 1..L-2 only.
  for (std::size_t l = 1; l + 1 < levels; ++l) {
    const SuccinctHistogram& h = histograms[l - 1];
    double thr = heavy_threshold(opt_guess, l, k, beta, levels, dim, params.d_power) + h.error_bound();
    for (const auto& entry : h.entries()) {
      if (entry.estimate < thr) continue;
      auto cell = cell_parse(entry.value);
      if (!cell || cell->level != l || cell->coords.size() != dim) continue;
      if (labels.heavy[l - 1].count(ancestor(*cell, 1)) == 0) continue;
      labels.heavy[l].insert(*cell);
    }
    double cap = params.heavy_cap_constant * static_cast<double>(k) *
                 static_cast<double>(levels) / beta;
    if (warnings && static_cast<double>(labels.heavy[l].size()) > cap) {
      warnings->push_back("heavy cell count at level " + std::to_string(l) +
                          " exceeds cap " + std::to_string(cap));
    }
  }
  return labels;
}

}  // namespace ldpkm
