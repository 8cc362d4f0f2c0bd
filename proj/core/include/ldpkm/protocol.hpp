#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ldpkm/geometry.hpp"
#include "ldpkm/privacy.hpp"

namespace ldpkm {

// One simulated party. The private point is only ever read by local
// randomizers; everything that leaves the agent is an AgentReport inside one
// of the round primitives (bitstogram_round / heavy_sums_round / the
// Gaussian release of round 4).
struct Agent {
  std::size_t id = 0;
  Point point;  // original space
};

std::vector<Agent> make_agents(const Dataset& d);

// What one protocol round did, identically for every agent.
struct RoundRecord {
  int round_id = 0;
  std::string name;
  double reports_per_agent = 0.0;
  PrivacyBudget charge_per_agent;  // composed over the round's parallel calls
};

class RoundLog {
 public:
  void note(int round_id, std::string name, double reports_per_agent, PrivacyBudget per_agent);
  const std::vector<RoundRecord>& records() const { return records_; }
  std::vector<int> round_ids() const;  // distinct, in order of first activity
  std::size_t round_count() const { return round_ids().size(); }

 private:
  std::vector<RoundRecord> records_;
};

struct Transcript {
  std::vector<RoundRecord> rounds;  // one entry per protocol round
  std::size_t size() const { return rounds.size(); }
  PrivacyBudget total() const;
};

// Per-agent transcripts reconstructed from the ledger and the round log.
std::vector<Transcript> transcripts_from(const AgentLedgerSet& ledger, const RoundLog& log);

// A protocol round: public bundle already captured inside `run`; the barrier
// between rounds is the sequential execution order.
struct ProtocolRound {
  int round_id = 0;
  std::string name;
  std::function<void()> run;
};

void run_rounds(std::vector<ProtocolRound>& rounds);

}  // namespace ldpkm
