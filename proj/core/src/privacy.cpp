#include "ldpkm/privacy.hpp"

#include <cmath>
#include <sstream>

#include "ldpkm/common.hpp"

namespace ldpkm {

PrivacyBudget compose(const std::vector<PrivacyBudget>& budgets) {
  KahanSum eps, del;
  for (const auto& b : budgets) {
    eps.add(b.epsilon);
    del.add(b.delta);
  }
  return {eps.value(), del.value()};
}

PrivacyBudget compose(const PrivacyBudget& a, const PrivacyBudget& b) {
  return {a.epsilon + b.epsilon, a.delta + b.delta};
}

GaussianNoiseSpec gaussian_spec(double epsilon, double delta, double sensitivity) {
  require(epsilon > 0.0, "gaussian_spec: epsilon must be positive");
  require(delta > 0.0 && delta < 1.0, "gaussian_spec: Gaussian mechanism requires 0 < delta < 1");
  require(sensitivity > 0.0, "gaussian_spec: sensitivity must be positive");
  GaussianNoiseSpec spec;
  spec.epsilon = epsilon;
  spec.delta = delta;
  spec.sensitivity = sensitivity;
  spec.c_g = std::sqrt(2.0 * std::log(1.25 / delta)) * (1.0 + 1e-9);
  spec.sigma = spec.c_g * sensitivity / epsilon;
  return spec;
}

Point gaussian_perturb(const Point& v, const GaussianNoiseSpec& spec, std::mt19937_64& rng) {
  Point out(v);
  gaussian_perturb_inplace(out, spec.sigma, rng);
  return out;
}

void gaussian_perturb_inplace(Point& v, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& x : v) x += noise(rng);
}

void AgentLedgerSet::charge(std::size_t agent, int round_id, PrivacyBudget b, double count) {
  auto& list = entries_.at(agent);
  if (!list.empty() && list.back().round_id == round_id &&
      list.back().budget.epsilon == b.epsilon && list.back().budget.delta == b.delta) {
    list.back().count += count;
  } else {
    list.push_back({round_id, b, count});
  }
  PrivacyBudget tot = composed(agent);
  if (tot.epsilon > global_.epsilon * (1.0 + kBudgetSlack) + 1e-300 ||
      tot.delta > global_.delta * (1.0 + kBudgetSlack) + 1e-300) {
    std::ostringstream os;
    os << "ledger overflow: agent " << agent << " round " << round_id << " composed ("
       << tot.epsilon << "," << tot.delta << ") exceeds (" << global_.epsilon << ","
       << global_.delta << ")";
    throw std::runtime_error(os.str());
  }
}

void AgentLedgerSet::charge_all(int round_id, PrivacyBudget b, double count) {
  for (std::size_t i = 0; i < entries_.size(); ++i) charge(i, round_id, b, count);
}

PrivacyBudget AgentLedgerSet::composed(std::size_t agent) const {
  KahanSum eps, del;
  for (const auto& e : entries_.at(agent)) {
    eps.add(e.budget.epsilon * e.count);
    del.add(e.budget.delta * e.count);
  }
  return {eps.value(), del.value()};
}

double AgentLedgerSet::charge_count(std::size_t agent) const {
  double n = 0;
  for (const auto& e : entries_.at(agent)) n += e.count;
  return n;
}

std::vector<int> AgentLedgerSet::rounds_charged(std::size_t agent) const {
  std::vector<int> rounds;
  for (const auto& e : entries_.at(agent)) {
    if (rounds.empty() || rounds.back() != e.round_id) rounds.push_back(e.round_id);
  }
  return rounds;
}

PrivacyBudget BudgetScheme::total() const {
  KahanSum eps, del;
  for (const auto& [name, share] : shares) {
    eps.add(share.per_call.epsilon * share.calls);
    del.add(share.per_call.delta * share.calls);
  }
  return {eps.value(), del.value()};
}

BudgetScheme split_budget_alg1(PrivacyBudget total, std::uint64_t levels) {
  require(levels >= 1, "split_budget_alg1: need at least one level");
  BudgetScheme s;
  double per_eps = total.epsilon / (2.0 * static_cast<double>(levels));
  s.shares["ph"] = {{per_eps, 0.0}, static_cast<double>(levels), 1};
  s.shares["pso"] = {{per_eps, total.delta / static_cast<double>(levels)},
                     static_cast<double>(levels), 1};
  validate_scheme(s, total);
  return s;
}

BudgetScheme split_budget_alg2(PrivacyBudget total, std::uint64_t round1_calls,
                               double round2_pair_calls) {
  require(round1_calls >= 1, "split_budget_alg2: need at least one round-1 call");
  require(round2_pair_calls >= 1.0, "split_budget_alg2: need at least one round-2 call");
  BudgetScheme s;
  double q_eps = total.epsilon / 4.0;
  double h_del = total.delta / 2.0;
  s.shares["ch"] = {{q_eps / static_cast<double>(round1_calls), 0.0},
                    static_cast<double>(round1_calls), 1};
  // Round 2 splits its quarter equally between the histogram and sum-oracle
  // sides, then over the parallel call grid. The call count can exceed what a
  // uint64 holds when p(1) is astronomically small, so it is carried as a
  // double; the ledger records the pair as two multiplicity entries.
  double bh_eps = (q_eps / 2.0) / round2_pair_calls;
  double bso_del = h_del / round2_pair_calls;
  s.shares["bh"] = {{bh_eps, 0.0}, round2_pair_calls, 2};
  s.shares["bso"] = {{bh_eps, bso_del}, round2_pair_calls, 2};
  s.shares["cch"] = {{q_eps, 0.0}, 1, 3};
  s.shares["gprime"] = {{q_eps / 2.0, h_del}, 1, 4};
  s.shares["sh"] = {{q_eps / 2.0, 0.0}, 1, 4};
  validate_scheme(s, total);
  return s;
}

void validate_scheme(const BudgetScheme& scheme, PrivacyBudget total) {
  PrivacyBudget t = scheme.total();
  if (t.epsilon > total.epsilon * (1.0 + kBudgetSlack) ||
      t.delta > total.delta * (1.0 + kBudgetSlack) + 1e-300) {
    std::ostringstream os;
    os << "budget scheme infeasible: shares compose to (" << t.epsilon << "," << t.delta
       << ") > (" << total.epsilon << "," << total.delta << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace ldpkm
