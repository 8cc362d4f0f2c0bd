#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldpkm/cells.hpp"
#include "ldpkm/geometry.hpp"

namespace ldpkm {

// Closed-form collision probability of one quantized-random-projection atom
// (Gaussian direction, uniform offset, bucket width w) at distance s.
double atom_collision_prob(double w, double s);

struct CollisionProfile {
  double p1 = 0.0;   // collision probability at distance 1 (after x/r scaling)
  double pc = 0.0;   // collision probability at distance c
  double ratio = 0.0;  // p1^2 / pc
  double c = 0.0;
  double width = 0.0;  // atom bucket width w
  std::size_t t = 0;   // concatenation length
  double atom_p1 = 0.0;
  double atom_pc = 0.0;
};

// Frozen at calibration; valid on the tuner's supported target range
// (B <= 4096). The quantized-projection family is weaker than ball carving
// for c near sqrt(2), so the floor constant is an empirical envelope.
constexpr double kLshFloorConst = 0.05;
constexpr std::size_t kLshMaxT = 512;

// Smallest t (and best width from a fixed grid) with analytic p1^2/pc >= B.
// Throws std::domain_error when the target is unreachable within t <= kLshMaxT;
// the message carries the best profile found.
CollisionProfile tune_t(double target_ratio, double c);

double lsh_floor_p1(double target_ratio, double c);

// ---------------------------------------------------------------------------
// Synthetic union-of-heavy-cells space for one level.
// ---------------------------------------------------------------------------
struct SyntheticSpace {
  std::size_t level = 0;
  std::size_t dim = 0;          // ambient cell-space dimension d
  double lambda = 0.0;          // block separation (14c+5) t_l sqrt(d)
  std::vector<CellId> anc_cells;  // sorted Anc*(H_l) index

  std::size_t synth_dim() const { return anc_cells.size() + dim; }
  // Conservative radius bound of the image set (for atom range enumeration).
  double radius_bound() const;
};

SyntheticSpace make_synthetic_space(const CellLabels& labels, std::size_t level, double c);

// Image of a point under Lambda_l; nullopt = the zero element (outside every
// heavy ancestor cell, excluded from hashing).
std::optional<Point> lambda_map(const Point& p, const SyntheticSpace& space);

// Projection onto the image of the chosen ancestor cell: argmax one-hot
// coordinate (ties -> lowest index; all-nonpositive falls back to the max
// anyway), offset clamped into the cell box. Returns a point in [0,1)^d.
Point project_to_heavy_cells(const Point& synthetic_point, const SyntheticSpace& space);

// ---------------------------------------------------------------------------
// Concatenated hash function instance.
// ---------------------------------------------------------------------------
class LshFunction {
 public:
  LshFunction() = default;
  LshFunction(const CollisionProfile& profile, std::size_t dim, double scale_r,
              std::uint64_t seed, std::string context_prefix);

  // Bucket key "(prefix):a1|a2|...|at"; nullopt input yields the reserved
  // non-participation token, which never matches a real bucket.
  std::string hash(const std::optional<Point>& x) const;
  std::string hash(const Point& x) const;
  std::string bottom() const;  // the reserved token

  std::vector<std::int64_t> atom_values(const Point& x) const;

  // All bucket keys whose atoms fall in the analytic range for inputs of the
  // given norm bound; empty when the product would exceed the cap.
  std::vector<std::string> enumerate_buckets(double input_radius, std::size_t cap = 200000) const;

  const CollisionProfile& profile() const { return profile_; }
  double scale() const { return scale_; }
  std::size_t dim() const { return dim_; }
  // log2 of the bucket-universe size for inputs of the given norm bound.
  double log2_buckets(double input_radius) const;

 private:
  CollisionProfile profile_;
  std::size_t dim_ = 0;
  double scale_ = 1.0;
  std::uint64_t seed_ = 0;
  std::string prefix_;
  std::vector<double> directions_;  // t x dim
  std::vector<double> offsets_;     // t
  std::vector<double> dir_norms_;   // t
};

}  // namespace ldpkm
