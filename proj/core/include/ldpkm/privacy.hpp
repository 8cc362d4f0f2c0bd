#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ldpkm/geometry.hpp"

namespace ldpkm {

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Basic composition: budgets add up component-wise.
PrivacyBudget compose(const std::vector<PrivacyBudget>& budgets);
PrivacyBudget compose(const PrivacyBudget& a, const PrivacyBudget& b);

struct GaussianNoiseSpec {
  double sigma = 0.0;
  double sensitivity = 0.0;  // l2 sensitivity of the released vector
  double c_g = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

// c_g = sqrt(2 ln(1.25/delta)) with a hair of margin so c_g^2 > 2 ln(1.25/delta)
// holds strictly in floating point; sigma = c_g * sensitivity / epsilon.
GaussianNoiseSpec gaussian_spec(double epsilon, double delta, double sensitivity);

// v + per-coordinate N(0, sigma^2).
Point gaussian_perturb(const Point& v, const GaussianNoiseSpec& spec, std::mt19937_64& rng);
void gaussian_perturb_inplace(Point& v, double sigma, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Ledger: the single enforcement point for privacy accounting. Every local
// randomizer charges it; parallel calls within one protocol round may be
// recorded with a multiplicity to keep entries compact.
// ---------------------------------------------------------------------------
struct LedgerEntry {
  int round_id = 0;
  PrivacyBudget budget;
  // Identical parallel charges in this round. Double because the notional
  // round-2 call grid of algorithm 2 can exceed what a uint64 holds.
  double count = 1.0;
};

class AgentLedgerSet {
 public:
  AgentLedgerSet() = default;
  AgentLedgerSet(std::size_t num_agents, PrivacyBudget global)
      : global_(global), entries_(num_agents) {}

  std::size_t num_agents() const { return entries_.size(); }
  PrivacyBudget global_budget() const { return global_; }

  // Charges one agent. Throws on ledger overflow (composition beyond global).
  void charge(std::size_t agent, int round_id, PrivacyBudget b, double count = 1.0);

  // Charges every agent identically (the usual case for a protocol round).
  void charge_all(int round_id, PrivacyBudget b, double count = 1.0);

  PrivacyBudget composed(std::size_t agent) const;
  const std::vector<LedgerEntry>& entries(std::size_t agent) const { return entries_.at(agent); }

  // Number of individual charges (counting multiplicities).
  double charge_count(std::size_t agent) const;

  // Distinct round ids an agent was charged in, in order of first charge.
  std::vector<int> rounds_charged(std::size_t agent) const;

 private:
  PrivacyBudget global_{0.0, 0.0};
  std::vector<std::vector<LedgerEntry>> entries_;
};

// Relative slack used when comparing composed budgets against the global one;
// the allocations are exact up to float round-off in the per-call division.
constexpr double kBudgetSlack = 1e-9;

// ---------------------------------------------------------------------------
// Deterministic allocation tables.
// ---------------------------------------------------------------------------
struct BudgetScheme {
  // name -> (per-call budget, number of parallel calls)
  struct Share {
    PrivacyBudget per_call;
    double calls = 1.0;
    int round_id = 1;
  };
  std::map<std::string, Share> shares;

  PrivacyBudget total() const;
};

// Algorithm 1: 2L equal-epsilon calls in one round; delta spread over the L
// sum-oracle calls (the histogram calls are pure-epsilon).
BudgetScheme split_budget_alg1(PrivacyBudget total, std::uint64_t levels);

// Algorithm 2: four rounds at (e/4,0), (e/4,d/2), (e/4,0), (e/4,d/2); round 2
// subdivided over the actual (f,l,m,r) call grid, round 4 over its two calls.
BudgetScheme split_budget_alg2(PrivacyBudget total, std::uint64_t round1_calls,
                               double round2_pair_calls);

// Generic feasibility check: composed shares must stay within the total.
void validate_scheme(const BudgetScheme& scheme, PrivacyBudget total);

}  // namespace ldpkm
