#include "ldpkm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldpkm/common.hpp"

namespace ldpkm {

namespace {

double total_weight(const std::vector<Point>& pts, const std::vector<double>& weights) {
  if (weights.empty()) return static_cast<double>(pts.size());
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

}  // namespace

CenterSet kmeanspp_seed(const std::vector<Point>& pts, const std::vector<double>& weights,
                        std::size_t k, std::mt19937_64& rng) {
  require(k >= 1, "kmeanspp_seed: k must be >= 1");
  require(!pts.empty(), "kmeanspp_seed: empty data");
  require(total_weight(pts, weights) > 0.0, "kmeanspp_seed: total weight must be positive");

  auto w_of = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  CenterSet out;
  std::vector<double> mindist(pts.size(), std::numeric_limits<double>::infinity());

  // First center: weight-proportional draw.
  {
    std::vector<double> probs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) probs[i] = std::max(w_of(i), 0.0);
    std::discrete_distribution<std::size_t> first(probs.begin(), probs.end());
    out.centers.push_back(pts[first(rng)]);
  }

  while (out.centers.size() < k) {
    const Point& latest = out.centers.back();
    double mass = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      mindist[i] = std::min(mindist[i], squared_distance(pts[i], latest));
      mass += w_of(i) * mindist[i];
    }
    if (mass <= 0.0) {
      // All remaining mass sits on existing centers; duplicates are allowed.
      out.centers.push_back(out.centers.back());
      continue;
    }
    std::vector<double> probs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) probs[i] = std::max(w_of(i) * mindist[i], 0.0);
    std::discrete_distribution<std::size_t> draw(probs.begin(), probs.end());
    out.centers.push_back(pts[draw(rng)]);
  }
  return out;
}

CenterSet lloyd(const std::vector<Point>& pts, const std::vector<double>& weights,
                CenterSet centers, const KMeansConfig& config) {
  require(!centers.centers.empty(), "lloyd: empty initial centers");
  double prev = clustering_cost(pts, weights, centers);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    ClusterAssignment labels = assign(pts, centers);
    std::vector<bool> empty;
    CenterSet next = cluster_means(pts, weights, labels, centers.centers.size(), &empty);
    // Empty clusters keep their previous center so indices stay stable.
    for (std::size_t j = 0; j < next.centers.size(); ++j) {
      if (empty[j]) next.centers[j] = centers.centers[j];
    }
    double cost = clustering_cost(pts, weights, next);
    if (cost > prev * (1.0 + 1e-9) + 1e-12) {
      throw std::logic_error("lloyd: cost increased, monotonicity violated");
    }
    centers = std::move(next);
    if (prev - cost <= config.tolerance * std::max(prev, 1e-300)) {
      prev = cost;
      break;
    }
    prev = cost;
  }
  return centers;
}

CenterSet standard_kmeans(const std::vector<Point>& pts, const std::vector<double>& weights,
                          std::size_t k, const KMeansConfig& config) {
  require(config.restarts >= 1, "standard_kmeans: need at least one restart");
  CenterSet best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < config.restarts; ++r) {
    auto rng = make_rng(config.seed, "kmeans-restart", r);
    CenterSet seeded = kmeanspp_seed(pts, weights, k, rng);
    CenterSet refined = lloyd(pts, weights, std::move(seeded), config);
    double cost = clustering_cost(pts, weights, refined);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(refined);
    }
  }
  return best;
}

CenterSet standard_kmeans(const Dataset& d, std::size_t k, const KMeansConfig& config) {
  return standard_kmeans(d.points, {}, k, config);
}

namespace {

struct BruteState {
  const Dataset* data;
  std::size_t k;
  std::vector<std::size_t> labels;
  double best_cost;
  std::vector<std::size_t> best_labels;
};

double partition_cost(const Dataset& d, const std::vector<std::size_t>& labels, std::size_t parts) {
  std::vector<Point> sums(parts, Point(d.dim, 0.0));
  std::vector<std::size_t> counts(parts, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    add_inplace(sums[labels[i]], d.points[i]);
    counts[labels[i]]++;
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    Point mean = scaled(sums[labels[i]], 1.0 / static_cast<double>(counts[labels[i]]));
    cost += squared_distance(d.points[i], mean);
  }
  return cost;
}

// Canonical enumeration: point i joins one of the parts used so far or opens
// a new one (if fewer than k are open). Avoids permuted duplicates.
void enumerate(BruteState& st, std::size_t i, std::size_t used) {
  if (i == st.data->size()) {
    double cost = partition_cost(*st.data, st.labels, used);
    if (cost < st.best_cost) {
      st.best_cost = cost;
      st.best_labels = st.labels;
    }
    return;
  }
  std::size_t limit = std::min(used + 1, st.k);
  for (std::size_t part = 0; part < limit; ++part) {
    st.labels[i] = part;
    enumerate(st, i + 1, std::max(used, part + 1));
  }
}

}  // namespace

BruteForceResult brute_force_kmeans(const Dataset& d, std::size_t k) {
  require(d.size() >= 1, "brute_force_kmeans: empty data");
  require(d.size() <= 14 && k <= 3, "brute_force_kmeans: instance too large");
  require(k >= 1, "brute_force_kmeans: k must be >= 1");
  BruteState st{&d, k, std::vector<std::size_t>(d.size(), 0),
                std::numeric_limits<double>::infinity(), {}};
  enumerate(st, 0, 0);
  std::size_t parts = 0;
  for (std::size_t l : st.best_labels) parts = std::max(parts, l + 1);
  CenterSet centers = cluster_means(d, st.best_labels, parts);
  while (centers.centers.size() < k) centers.centers.push_back(centers.centers.back());
  return {std::move(centers), st.best_cost};
}

}  // namespace ldpkm
