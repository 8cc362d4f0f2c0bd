#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ldpkm {

// A point is a plain coordinate vector; dimension is carried by the container.
using Point = std::vector<double>;

struct Dataset {
  std::vector<Point> points;
  std::size_t dim = 0;

  std::size_t size() const { return points.size(); }
};

// Centers with optional nonnegative weights (weighted center sets double as
// proxy datasets: each center repeated "with multiplicity" its weight).
struct CenterSet {
  std::vector<Point> centers;
  std::vector<double> weights;  // empty => unweighted

  std::size_t size() const { return centers.size(); }
  bool weighted() const { return !weights.empty(); }
};

using ClusterAssignment = std::vector<std::size_t>;

struct CostReport {
  double private_cost = 0.0;
  double baseline_cost = 0.0;
  double opt_estimate = 0.0;
  double additive_gap = 0.0;
  double mult_ratio = 0.0;
  double runtime_ms = 0.0;
  double eps_spent = 0.0;
  double delta_spent = 0.0;
  std::size_t candidate_count = 0;  // |S| for the bi-criteria stage (0 for alg1)
  std::size_t rounds = 0;
  std::vector<std::string> warnings;
};

double squared_distance(const Point& p, const Point& q);

// min over centers of squared distance.
double point_cost(const Point& p, const CenterSet& s);

double clustering_cost(const Dataset& d, const CenterSet& s);

// Weighted variant: data given as (points, weights); weights.empty() => 1.
double clustering_cost(const std::vector<Point>& pts, const std::vector<double>& weights,
                       const CenterSet& s);

// Proxy dataset (weighted CenterSet) used as data.
double clustering_cost(const CenterSet& weighted_data, const CenterSet& s);

// Nearest-center labels; ties broken by lowest center index.
ClusterAssignment assign(const Dataset& d, const CenterSet& s);
ClusterAssignment assign(const std::vector<Point>& pts, const CenterSet& s);

// Per-label means. Empty clusters get the origin sentinel and a flag.
CenterSet cluster_means(const Dataset& d, const ClusterAssignment& labels, std::size_t num_centers,
                        std::vector<bool>* empty_flags = nullptr);
CenterSet cluster_means(const std::vector<Point>& pts, const std::vector<double>& weights,
                        const ClusterAssignment& labels, std::size_t num_centers,
                        std::vector<bool>* empty_flags = nullptr);

double norm(const Point& p);
Point sub(const Point& a, const Point& b);
void add_inplace(Point& a, const Point& b, double scale = 1.0);
Point scaled(const Point& a, double s);

// Radial projection into the ball of the given radius (no-op if inside).
Point project_to_ball(Point p, double radius);

void finalize_cost_report(CostReport& r);

}  // namespace ldpkm
