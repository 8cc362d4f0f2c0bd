#include "theory_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "ldpkm/common.hpp"
#include "ldpkm/grids.hpp"

namespace ldpkm::testing {

LayerPartition layer_partition(const Dataset& d, const CenterSet& s_opt, std::size_t levels) {
  LayerPartition out;
  out.thresholds.resize(levels + 1);
  out.thresholds[0] = 0.0;
  for (std::size_t l = 1; l <= levels; ++l) {
    out.thresholds[l] = std::ldexp(1.0, static_cast<int>(l) - static_cast<int>(levels) + 1);
  }
  out.layers.resize(levels + 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    double z = point_cost(d.points[i], s_opt);
    std::size_t bucket = levels;
    for (std::size_t l = 1; l <= levels; ++l) {
      if (z < out.thresholds[l]) {
        bucket = l - 1;
        break;
      }
    }
    out.layers[bucket].push_back(i);
  }
  return out;
}

double abel_identity_gap(const std::vector<double>& a_sizes, const std::vector<double>& r) {
  // A_l = sum_{j >= l} |a_j|; identity: sum_l A_l (r_l - r_{l-1}) = sum_l |a_l| r_l.
  std::size_t levels = a_sizes.size();
  std::vector<double> suffix(levels + 1, 0.0);
  for (std::size_t l = levels; l-- > 0;) suffix[l] = suffix[l + 1] + a_sizes[l];
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t l = 0; l < levels; ++l) {
    lhs += suffix[l] * (r[l + 1] - r[l]);
    rhs += a_sizes[l] * r[l + 1];
  }
  return std::abs(lhs - rhs);
}

std::vector<std::map<std::string, double>> shadow_counts(
    const std::vector<Point>& reduced, std::size_t levels, double alpha,
    const std::vector<std::vector<std::string>>& picked_keys_per_level) {
  std::size_t dim = reduced.empty() ? 0 : reduced.front().size();
  std::vector<std::map<std::string, double>> out(levels);
  std::vector<bool> covered(reduced.size(), false);
  for (std::size_t l = 1; l <= levels; ++l) {
    GridSpec spec = make_grid_spec(l, levels, alpha, dim);
    std::unordered_map<std::string, double> uncovered_count;
    std::vector<std::string> keys(reduced.size());
    for (std::size_t i = 0; i < reduced.size(); ++i) {
      keys[i] = grid_key(floor_to_grid(reduced[i], spec));
      if (!covered[i]) uncovered_count[keys[i]] += 1.0;
    }
    const auto& picks = picked_keys_per_level[l - 1];
    std::unordered_set<std::string> pick_set(picks.begin(), picks.end());
    for (const std::string& key : picks) {
      auto it = uncovered_count.find(key);
      out[l - 1][key] = it == uncovered_count.end() ? 0.0 : it->second;
    }
    for (std::size_t i = 0; i < reduced.size(); ++i) {
      if (!covered[i] && pick_set.count(keys[i])) covered[i] = true;
    }
  }
  return out;
}

std::size_t greedy_cover_count(const CoverInstance& inst, std::size_t picks) {
  std::vector<bool> covered(inst.universe, false);
  std::size_t total = 0;
  for (std::size_t step = 0; step < picks; ++step) {
    std::size_t best_set = inst.sets.size();
    std::size_t best_gain = 0;
    for (std::size_t s = 0; s < inst.sets.size(); ++s) {
      std::size_t gain = 0;
      for (std::size_t e : inst.sets[s]) {
        if (!covered[e]) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best_set = s;
      }
    }
    if (best_set == inst.sets.size()) break;
    for (std::size_t e : inst.sets[best_set]) {
      if (!covered[e]) {
        covered[e] = true;
        ++total;
      }
    }
  }
  return total;
}

namespace {

bool cover_with(const CoverInstance& inst, std::vector<std::size_t>& chosen, std::size_t start,
                std::size_t remaining, std::vector<int>& cover_count, std::size_t uncovered) {
  if (uncovered == 0) return true;
  if (remaining == 0) return false;
  for (std::size_t s = start; s < inst.sets.size(); ++s) {
    std::size_t newly = 0;
    for (std::size_t e : inst.sets[s]) {
      if (cover_count[e]++ == 0) ++newly;
    }
    chosen.push_back(s);
    if (cover_with(inst, chosen, s + 1, remaining - 1, cover_count, uncovered - newly)) return true;
    chosen.pop_back();
    for (std::size_t e : inst.sets[s]) --cover_count[e];
  }
  return false;
}

}  // namespace

std::size_t exhaustive_min_cover(const CoverInstance& inst) {
  std::vector<bool> reachable(inst.universe, false);
  for (const auto& s : inst.sets) {
    for (std::size_t e : s) reachable[e] = true;
  }
  for (bool r : reachable) require(r, "exhaustive_min_cover: universe not coverable");
  for (std::size_t size = 1; size <= inst.sets.size(); ++size) {
    std::vector<std::size_t> chosen;
    std::vector<int> cover_count(inst.universe, 0);
    if (cover_with(inst, chosen, 0, size, cover_count, inst.universe)) return size;
  }
  return inst.sets.size();
}

CellLabels oracle_mark(const std::vector<Point>& xs, double opt_guess, std::size_t k, double beta,
                       std::size_t levels, std::size_t dim, double d_power) {
  CellLabels labels;
  labels.opt_guess = opt_guess;
  labels.levels = levels;
  labels.dim = dim;
  labels.heavy.resize(levels);
  CellId root;
  root.level = 0;
  root.coords.assign(dim, 0);
  labels.heavy[0].insert(root);
  for (std::size_t l = 1; l + 1 < levels; ++l) {
    std::unordered_map<std::string, double> counts;
    std::vector<CellId> cells;
    for (const Point& x : xs) {
      CellId c = cell_of(x, l);
      std::string key = cell_key(c);
      if (counts[key] == 0.0) cells.push_back(c);
      counts[key] += 1.0;
    }
    double thr = heavy_threshold(opt_guess, l, k, beta, levels, dim, d_power);
    for (const CellId& c : cells) {
      if (counts[cell_key(c)] < thr) continue;
      if (labels.heavy[l - 1].count(ancestor(c, 1)) == 0) continue;
      labels.heavy[l].insert(c);
    }
  }
  return labels;
}

std::vector<std::size_t> transition_levels(const std::vector<Point>& xs, const CellLabels& labels) {
  std::vector<std::size_t> out(xs.size(), 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t l = 0;
    while (l + 1 < labels.levels && labels.is_heavy(cell_of(xs[i], l))) ++l;
    // l is now the first light level along the chain (or L-1, forced light).
    out[i] = l;
  }
  return out;
}

}  // namespace ldpkm::testing
