#include "ldpkm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldpkm/common.hpp"

namespace ldpkm {

double squared_distance(const Point& p, const Point& q) {
  require(p.size() == q.size(), "squared_distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = p[i] - q[i];
    acc += d * d;
  }
  return acc;
}

double point_cost(const Point& p, const CenterSet& s) {
  require(!s.centers.empty(), "point_cost: empty center set");
  double best = std::numeric_limits<double>::infinity();
  for (const Point& c : s.centers) best = std::min(best, squared_distance(p, c));
  return best;
}

double clustering_cost(const std::vector<Point>& pts, const std::vector<double>& weights,
                       const CenterSet& s) {
  require(!s.centers.empty(), "clustering_cost: empty center set");
  KahanSum acc;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double w = weights.empty() ? 1.0 : weights[i];
    if (w == 0.0) continue;
    acc.add(w * point_cost(pts[i], s));
  }
  return acc.value();
}

double clustering_cost(const Dataset& d, const CenterSet& s) {
  return clustering_cost(d.points, {}, s);
}

double clustering_cost(const CenterSet& weighted_data, const CenterSet& s) {
  return clustering_cost(weighted_data.centers, weighted_data.weights, s);
}

ClusterAssignment assign(const std::vector<Point>& pts, const CenterSet& s) {
  require(!s.centers.empty(), "assign: empty center set");
  ClusterAssignment labels(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < s.centers.size(); ++j) {
      double z = squared_distance(pts[i], s.centers[j]);
      if (z < best) {
        best = z;
        arg = j;
      }
    }
    labels[i] = arg;
  }
  return labels;
}

ClusterAssignment assign(const Dataset& d, const CenterSet& s) { return assign(d.points, s); }

CenterSet cluster_means(const std::vector<Point>& pts, const std::vector<double>& weights,
                        const ClusterAssignment& labels, std::size_t num_centers,
                        std::vector<bool>* empty_flags) {
  require(labels.size() == pts.size(), "cluster_means: label count mismatch");
  std::size_t dim = pts.empty() ? 0 : pts.front().size();
  std::vector<Point> sums(num_centers, Point(dim, 0.0));
  std::vector<double> mass(num_centers, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    require(labels[i] < num_centers, "cluster_means: label out of range");
    double w = weights.empty() ? 1.0 : weights[i];
    add_inplace(sums[labels[i]], pts[i], w);
    mass[labels[i]] += w;
  }
  CenterSet out;
  out.centers.resize(num_centers, Point(dim, 0.0));
  if (empty_flags) empty_flags->assign(num_centers, false);
  for (std::size_t j = 0; j < num_centers; ++j) {
    if (mass[j] > 0.0) {
      out.centers[j] = scaled(sums[j], 1.0 / mass[j]);
    } else if (empty_flags) {
      (*empty_flags)[j] = true;  // origin sentinel keeps the index stable
    }
  }
  return out;
}

CenterSet cluster_means(const Dataset& d, const ClusterAssignment& labels, std::size_t num_centers,
                        std::vector<bool>* empty_flags) {
  return cluster_means(d.points, {}, labels, num_centers, empty_flags);
}

double norm(const Point& p) {
  double acc = 0.0;
  for (double v : p) acc += v * v;
  return std::sqrt(acc);
}

Point sub(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

void add_inplace(Point& a, const Point& b, double scale) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
}

Point scaled(const Point& a, double s) {
  Point out(a);
  for (double& v : out) v *= s;
  return out;
}

Point project_to_ball(Point p, double radius) {
  double n = norm(p);
  if (n > radius && n > 0.0) {
    double f = radius / n;
    for (double& v : p) v *= f;
  }
  return p;
}

void finalize_cost_report(CostReport& r) {
  constexpr double kTinyFloor = 1e-12;
  r.additive_gap = r.private_cost - r.opt_estimate;
  r.mult_ratio = r.private_cost / std::max(r.baseline_cost, kTinyFloor);
}

}  // namespace ldpkm
