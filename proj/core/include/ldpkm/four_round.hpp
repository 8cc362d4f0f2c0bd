#pragma once

#include <cstdint>
#include <optional>

#include "ldpkm/cells.hpp"
#include "ldpkm/dimred.hpp"
#include "ldpkm/freq.hpp"
#include "ldpkm/geometry.hpp"
#include "ldpkm/kmeans.hpp"
#include "ldpkm/lsh.hpp"
#include "ldpkm/privacy.hpp"
#include "ldpkm/protocol.hpp"

namespace ldpkm {

struct Alg2Params {
  std::size_t k = 2;
  double epsilon = 1.0;
  double delta = 1e-6;
  double beta = 0.05;
  double c = 2.0;      // LSH approximation factor, > sqrt(2)
  double alpha = 0.45;  // only shapes the dimension-reduction map
  std::size_t n = 0;
  std::uint64_t seed = 1;
  bool noiseless = false;
  double c_dim = 1.0;
  double c_b = 1.0;  // constant inside the LSH ratio target B
  double c_r = 4.0;  // frozen repetition constant
  double c_t = 1.0;  // frozen constant in the third threshold branch
  double d_power = 0.0;
  std::size_t histogram_buckets = 2048;
  KMeansConfig kmeans;

  // Derived once the reduced dimension is known (see derive_alg2).
  std::size_t levels = 0;     // L
  std::size_t dim_reduced = 0;
  std::size_t scales = 0;     // M
  double reps = 0.0;          // R (double: can be astronomically large)
  double ratio_target = 0.0;  // B
  CollisionProfile profile;
  BudgetScheme budgets;
  std::vector<double> guesses;  // OPT guesses k sqrt(n) 2^f
};

Alg2Params make_alg2_params(std::size_t k, double epsilon, double delta, double c, double beta,
                            std::size_t n, std::uint64_t seed);

// Geometric guesses k*sqrt(n)*2^f for f = 0..F covering [k sqrt(n), n].
std::vector<double> opt_guesses(std::size_t n, std::size_t k);

// Fills the derived fields once the reduced dimension is known.
void derive_alg2(Alg2Params& params, std::size_t dim_reduced);

struct Alg2Round1 {
  DomainMap map;
  std::vector<Point> reduced_points;          // x' in [0,1)^d per agent
  std::vector<SuccinctHistogram> histograms;  // CH^l at index l-1, levels 1..L-1
};

Alg2Round1 round1_cell_histograms(const std::vector<Agent>& agents, const DomainMap& map,
                                  const Alg2Params& params, AgentLedgerSet* ledger, RoundLog& log);

struct GuessContext {
  std::size_t f = 0;
  double opt_guess = 0.0;
  CellLabels labels;
};

GuessContext make_guess_context(const Alg2Round1& round1, const Alg2Params& params, std::size_t f,
                                std::vector<std::string>* warnings);

// Bucket-count threshold T_l for one guess/level.
double bucket_threshold(const Alg2Params& params, double opt_guess, std::size_t level);

// One (l, m, r) hashing call for one guess: bucket histogram + sum oracle over
// the synthetic images. Non-participants report the reserved bottom token.
struct BucketRound {
  SuccinctHistogram histogram;
  SumOracle oracle;
  LshFunction fn;
};

BucketRound round2_single_call(const std::vector<std::optional<Point>>& images,
                               const SyntheticSpace& space, double scale_r, std::size_t m_index,
                               std::size_t rep_index, std::size_t f, const Alg2Params& params,
                               AgentLedgerSet* ledger);

struct BiCriteriaSolution {
  std::vector<Point> centers;            // x'-space candidates
  std::vector<std::string> provenance;   // "cell:<key>" or "bucket:f,l,m,r"
  std::size_t heavy_cell_centers = 0;
  std::size_t bucket_centers = 0;

  CenterSet as_center_set() const;
};

struct CandidateAuditRow {
  std::size_t f = 0;
  std::size_t level = 0;
  double threshold = 0.0;
  double cap = 0.0;
  std::size_t bucket_centers = 0;
  bool executed = false;
};

struct Alg2Round2 {
  BiCriteriaSolution solution;
  std::vector<CandidateAuditRow> audit;
  double executed_pair_calls = 0.0;
  double planned_pair_calls = 0.0;
};

// Runs the second interaction round across all guesses and folds each call's
// qualifying bucket averages into the candidate set (Candidate Center
// Allocation); also allocates a center at every heavy cell.
Alg2Round2 round2_lsh(const std::vector<Agent>& agents, const Alg2Round1& round1,
                      const std::vector<GuessContext>& contexts, const Alg2Params& params,
                      AgentLedgerSet* ledger, RoundLog& log,
                      std::vector<std::string>* warnings);

struct Alg2Round3 {
  SuccinctHistogram cch;
  CenterSet proxy;            // D*
  CenterSet reduced_centers;  // S*
  std::vector<std::string> warnings;
};

Alg2Round3 round3_proxy(const std::vector<Agent>& agents, const Alg2Round1& round1,
                        const BiCriteriaSolution& solution, const Alg2Params& params,
                        AgentLedgerSet* ledger, RoundLog& log);

struct Alg2Round4 {
  CenterSet centers;  // S' in the original space
  std::vector<std::string> warnings;
};

Alg2Round4 round4_recover(const std::vector<Agent>& agents, const Alg2Round1& round1,
                          const CenterSet& reduced_centers, const Alg2Params& params,
                          AgentLedgerSet* ledger, RoundLog& log);

struct Alg2Result {
  CenterSet centers;
  CostReport report;
  BiCriteriaSolution bicriteria;
  std::vector<CandidateAuditRow> audit;
  CenterSet reduced_centers;
  DomainMap map;
  RoundLog log;
  std::vector<SuccinctHistogram> histograms;  // CH^l plus the CCH, for artifacts
};

Alg2Result low_error_kmeans(const std::vector<Agent>& agents, const Alg2Params& params,
                            AgentLedgerSet* ledger);

}  // namespace ldpkm
