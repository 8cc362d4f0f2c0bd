#include "ldpkm/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldpkm/common.hpp"

namespace ldpkm {

double atom_collision_prob(double w, double s) {
  require(w > 0.0, "atom_collision_prob: width must be positive");
  if (s <= 0.0) return 1.0;
  double u = w / s;
  double term1 = 1.0 - 2.0 * std_normal_cdf(-u);
  double term2 = (2.0 / (std::sqrt(2.0 * M_PI) * u)) * (1.0 - std::exp(-u * u / 2.0));
  return std::max(0.0, term1 - term2);
}

double lsh_floor_p1(double target_ratio, double c) {
  double cprime = c * c / 8.0 - 0.25;
  if (cprime <= 0.0) return 0.0;
  return kLshFloorConst * std::pow(target_ratio, -1.0 / cprime) /
         std::max(1.0, std::log(target_ratio));
}

CollisionProfile tune_t(double target_ratio, double c) {
  require(target_ratio > 1.0, "tune_t: target ratio must exceed 1");
  require(c > std::sqrt(2.0), "tune_t: c must exceed sqrt(2)");

  static const double kWidths[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0,
                                   4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0};
  CollisionProfile best;
  bool have_best = false;
  std::size_t best_t = kLshMaxT + 1;
  double best_ratio_seen = 0.0;
  CollisionProfile closest;  // for the rejection message

  for (double w : kWidths) {
    double a = atom_collision_prob(w, 1.0);
    double b = atom_collision_prob(w, c);
    if (a <= 0.0 || b <= 0.0) continue;
    double lr = 2.0 * std::log(a) - std::log(b);
    if (lr <= 0.0) {
      if (std::pow(a, 2.0) / b > best_ratio_seen) {
        best_ratio_seen = a * a / b;
        closest = {a, b, a * a / b, c, w, 1, a, b};
      }
      continue;
    }
    auto t = static_cast<std::size_t>(std::ceil(std::log(target_ratio) / lr));
    t = std::max<std::size_t>(t, 1);
    if (t > kLshMaxT) {
      double r_at_max = std::exp(lr * static_cast<double>(kLshMaxT));
      if (r_at_max > best_ratio_seen) {
        best_ratio_seen = r_at_max;
        closest = {std::pow(a, static_cast<double>(kLshMaxT)),
                   std::pow(b, static_cast<double>(kLshMaxT)),
                   r_at_max,
                   c,
                   w,
                   kLshMaxT,
                   a,
                   b};
      }
      continue;
    }
    double p1 = std::pow(a, static_cast<double>(t));
    if (t < best_t || (t == best_t && (!have_best || p1 > best.p1))) {
      best_t = t;
      best = {p1, std::pow(b, static_cast<double>(t)), p1 * p1 / std::pow(b, static_cast<double>(t)),
              c, w, t, a, b};
      have_best = true;
    }
  }

  if (!have_best) {
    std::ostringstream os;
    os << "tune_t: ratio target " << target_ratio << " unreachable within t <= " << kLshMaxT
       << "; best found ratio " << closest.ratio << " at w=" << closest.width
       << " t=" << closest.t;
    throw std::domain_error(os.str());
  }
  return best;
}

// ---------------------------------------------------------------------------
// Synthetic space
// ---------------------------------------------------------------------------

double SyntheticSpace::radius_bound() const {
  double side = cell_side(level >= anc_star_levels(dim) ? level - anc_star_levels(dim) : 0);
  double offset_radius = 0.5 * side * std::sqrt(static_cast<double>(dim));
  return std::sqrt(lambda * lambda + offset_radius * offset_radius);
}

SyntheticSpace make_synthetic_space(const CellLabels& labels, std::size_t level, double c) {
  require(level >= 1 && level < labels.levels, "make_synthetic_space: level out of range");
  SyntheticSpace space;
  space.level = level;
  space.dim = labels.dim;
  space.lambda =
      (14.0 * c + 5.0) * cell_side(level) * std::sqrt(static_cast<double>(labels.dim));
  std::vector<CellId> ancs;
  for (const CellId& h : labels.heavy_at(level)) ancs.push_back(anc_star(h, labels.dim));
  std::sort(ancs.begin(), ancs.end());
  ancs.erase(std::unique(ancs.begin(), ancs.end()), ancs.end());
  space.anc_cells = std::move(ancs);
  return space;
}

std::optional<Point> lambda_map(const Point& p, const SyntheticSpace& space) {
  CellId cell = cell_of(p, space.level);
  CellId anc = anc_star(cell, space.dim);
  auto it = std::lower_bound(space.anc_cells.begin(), space.anc_cells.end(), anc);
  if (it == space.anc_cells.end() || !(*it == anc)) return std::nullopt;
  std::size_t idx = static_cast<std::size_t>(it - space.anc_cells.begin());
  Point out(space.synth_dim(), 0.0);
  out[idx] = space.lambda;
  Point center = cell_center(anc);
  for (std::size_t e = 0; e < space.dim; ++e) {
    out[space.anc_cells.size() + e] = p[e] - center[e];
  }
  return out;
}

Point project_to_heavy_cells(const Point& synthetic_point, const SyntheticSpace& space) {
  require(synthetic_point.size() == space.synth_dim(),
          "project_to_heavy_cells: dimension mismatch");
  require(!space.anc_cells.empty(), "project_to_heavy_cells: no heavy ancestor cells");
  std::size_t arg = 0;
  double best = synthetic_point[0];
  for (std::size_t i = 1; i < space.anc_cells.size(); ++i) {
    if (synthetic_point[i] > best) {
      best = synthetic_point[i];
      arg = i;
    }
  }
  const CellId& anc = space.anc_cells[arg];
  Point center = cell_center(anc);
  double side = cell_side(anc.level);
  Point out(space.dim);
  for (std::size_t e = 0; e < space.dim; ++e) {
    double lo = static_cast<double>(anc.coords[e]) * side;
    double hi = std::nextafter(lo + side, lo);  // stay inside the half-open box
    double v = center[e] + synthetic_point[space.anc_cells.size() + e];
    out[e] = std::min(std::max(v, lo), hi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LshFunction
// ---------------------------------------------------------------------------

LshFunction::LshFunction(const CollisionProfile& profile, std::size_t dim, double scale_r,
                         std::uint64_t seed, std::string context_prefix)
    : profile_(profile), dim_(dim), scale_(scale_r), seed_(seed), prefix_(std::move(context_prefix)) {
  require(dim_ >= 1, "LshFunction: dimension must be >= 1");
  require(scale_ > 0.0, "LshFunction: scale must be positive");
  require(profile_.t >= 1, "LshFunction: profile with t = 0");
  auto rng = make_rng(seed_, "lsh-atoms");
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, profile_.width);
  directions_.resize(profile_.t * dim_);
  offsets_.resize(profile_.t);
  dir_norms_.resize(profile_.t);
  for (std::size_t a = 0; a < profile_.t; ++a) {
    double nrm2 = 0.0;
    for (std::size_t e = 0; e < dim_; ++e) {
      double v = g(rng);
      directions_[a * dim_ + e] = v;
      nrm2 += v * v;
    }
    dir_norms_[a] = std::sqrt(nrm2);
    offsets_[a] = u(rng);
  }
}

std::vector<std::int64_t> LshFunction::atom_values(const Point& x) const {
  require(x.size() == dim_, "LshFunction: input dimension mismatch");
  std::vector<std::int64_t> vals(profile_.t);
  for (std::size_t a = 0; a < profile_.t; ++a) {
    const double* dir = &directions_[a * dim_];
    double dot = 0.0;
    for (std::size_t e = 0; e < dim_; ++e) dot += dir[e] * x[e];
    vals[a] = static_cast<std::int64_t>(std::floor((dot / scale_ + offsets_[a]) / profile_.width));
  }
  return vals;
}

std::string LshFunction::bottom() const { return prefix_ + ":_"; }

std::string LshFunction::hash(const Point& x) const {
  std::vector<std::int64_t> vals = atom_values(x);
  std::string out = prefix_;
  out += ':';
  for (std::size_t a = 0; a < vals.size(); ++a) {
    if (a) out += '|';
    out += std::to_string(vals[a]);
  }
  return out;
}

std::string LshFunction::hash(const std::optional<Point>& x) const {
  return x ? hash(*x) : bottom();
}

std::vector<std::string> LshFunction::enumerate_buckets(double input_radius,
                                                        std::size_t cap) const {
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges(profile_.t);
  double total = 1.0;
  for (std::size_t a = 0; a < profile_.t; ++a) {
    double reach = dir_norms_[a] * input_radius / scale_;
    auto lo = static_cast<std::int64_t>(std::floor((-reach) / profile_.width)) - 1;
    auto hi = static_cast<std::int64_t>(std::floor((reach + profile_.width) / profile_.width)) + 1;
    ranges[a] = {lo, hi};
    total *= static_cast<double>(hi - lo + 1);
    if (total > static_cast<double>(cap)) return {};
  }
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::int64_t> current(profile_.t);
  // Odometer over the per-atom ranges.
  for (std::size_t a = 0; a < profile_.t; ++a) current[a] = ranges[a].first;
  while (true) {
    std::string key = prefix_;
    key += ':';
    for (std::size_t a = 0; a < profile_.t; ++a) {
      if (a) key += '|';
      key += std::to_string(current[a]);
    }
    out.push_back(std::move(key));
    std::size_t a = 0;
    while (a < profile_.t && ++current[a] > ranges[a].second) {
      current[a] = ranges[a].first;
      ++a;
    }
    if (a == profile_.t) break;
  }
  return out;
}

double LshFunction::log2_buckets(double input_radius) const {
  double bits = 0.0;
  for (std::size_t a = 0; a < profile_.t; ++a) {
    double reach = dir_norms_[a] * input_radius / scale_;
    double count = 2.0 * reach / profile_.width + 2.0;
    bits += std::log2(std::max(count, 2.0));
  }
  return bits;
}

}  // namespace ldpkm
