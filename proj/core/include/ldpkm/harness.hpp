#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldpkm/four_round.hpp"
#include "ldpkm/geometry.hpp"
#include "ldpkm/one_round.hpp"
#include "ldpkm/protocol.hpp"

namespace ldpkm {

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------
struct MixtureTruth {
  CenterSet means;
  ClusterAssignment labels;
};

// k planted means on a randomly rotated centered simplex frame with the exact
// pairwise separation, equal mixture, truncated Gaussian noise; every output
// lies inside B(0,1).
Dataset gen_gaussian_mixture(std::size_t n, std::size_t d_prime, std::size_t k, double separation,
                             double stddev, std::uint64_t seed, MixtureTruth* truth = nullptr);

// ---------------------------------------------------------------------------
// Protocol simulation
// ---------------------------------------------------------------------------

// Executes the rounds with barriers and reconstructs per-agent transcripts
// from the ledger and log. Zero rounds => empty transcripts.
std::vector<Transcript> simulate_protocol(std::size_t num_agents, std::vector<ProtocolRound>& rounds,
                                          const AgentLedgerSet& ledger, const RoundLog& log);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------
struct ExperimentConfig {
  std::string algorithm = "both";  // alg1 | alg2 | baseline | both
  std::size_t n = 10000;
  std::size_t d_prime = 10;
  std::size_t k = 5;
  double epsilon = 2.0;
  double delta = 1e-6;
  double alpha = 0.3;  // alg1 accuracy knob (alg2 uses it only for the map)
  double c = 2.0;      // alg2 LSH approximation factor
  double beta = 0.05;
  double separation = 0.4;
  double stddev = 0.03;
  std::uint64_t seed = 1;
  bool noiseless = false;
  double c_dim = 1.0;
  double c_s = 0.8;
  double c_b = 1.0;
  double c_r = 4.0;
  double c_t = 1.0;
  double d_power = 0.0;
  std::size_t ng_cap = 0;  // 0 = default (20 k)
  std::size_t restarts = 8;
  std::string out_dir;  // artifacts directory; env LDPKM_OUT overrides
  bool write_artifacts = false;

  void validate() const;
};

ExperimentConfig config_from_json_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

// Output-directory resolution: env LDPKM_OUT beats the config value.
std::string resolve_out_dir(const ExperimentConfig& config);

struct ExperimentRow {
  std::string algorithm;  // alg1 | alg2 | baseline
  ExperimentConfig config;
  CostReport report;
  std::size_t dim_reduced = 0;
  std::size_t levels = 0;
};

std::string csv_header();
std::string csv_row(const ExperimentRow& row);

// Runs the configured algorithm(s) plus the non-private baseline on identical
// data/seeds; appends one row per run and (optionally) writes round artifacts.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

Alg1Params alg1_params_from(const ExperimentConfig& config);
Alg2Params alg2_params_from(const ExperimentConfig& config);

// Round-artifact serialization (documented in the README).
std::string histogram_artifact_json(const SuccinctHistogram& h);
std::string oracle_artifact_json(const SumOracle& o, bool include_reports);
std::string map_artifact_json(const DomainMap& m);
void write_run_artifacts(const std::string& dir, const ExperimentRow& row,
                         const std::vector<SuccinctHistogram>& histograms, const DomainMap& map);

}  // namespace ldpkm
