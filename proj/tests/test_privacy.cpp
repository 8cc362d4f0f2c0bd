#include <doctest.h>

#include <cmath>

#include "ldpkm/common.hpp"
#include "ldpkm/privacy.hpp"

using namespace ldpkm;

TEST_SUITE_BEGIN("privacy");

TEST_CASE("compose sums budgets") {
  CHECK(compose({}).epsilon == 0.0);
  CHECK(compose({}).delta == 0.0);
  PrivacyBudget two = compose({{1, 0}, {1, 0}});
  CHECK(two.epsilon == 2.0);
  PrivacyBudget mixed = compose({{0.5, 1e-6}, {0.25, 1e-6}, {0.25, 0}});
  CHECK(mixed.epsilon == doctest::Approx(1.0));
  CHECK(mixed.delta == doctest::Approx(2e-6));
}

TEST_CASE("compose is associative and commutative") {
  auto rng = make_rng(21, "priv-compose");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PrivacyBudget> budgets;
    for (int i = 0; i < 6; ++i) budgets.push_back({u(rng), u(rng) * 1e-5});
    PrivacyBudget all = compose(budgets);
    // Permuted.
    std::vector<PrivacyBudget> perm(budgets.rbegin(), budgets.rend());
    PrivacyBudget rev = compose(perm);
    CHECK(all.epsilon == doctest::Approx(rev.epsilon).epsilon(1e-12));
    CHECK(all.delta == doctest::Approx(rev.delta).epsilon(1e-12));
    // Grouped.
    PrivacyBudget left = compose(compose({budgets[0], budgets[1]}), budgets[2]);
    PrivacyBudget right = compose(budgets[0], compose({budgets[1], budgets[2]}));
    CHECK(left.epsilon == doctest::Approx(right.epsilon).epsilon(1e-12));
  }
}

TEST_CASE("gaussian_spec calibration") {
  GaussianNoiseSpec spec = gaussian_spec(1.0, 1e-5, 1.0);
  CHECK(spec.c_g == doctest::Approx(4.845).epsilon(0.01));
  CHECK(spec.sigma == doctest::Approx(spec.c_g).epsilon(1e-9));
  CHECK(spec.c_g * spec.c_g > 2.0 * std::log(1.25 / 1e-5));

  GaussianNoiseSpec half = gaussian_spec(2.0, 1e-5, 1.0);
  CHECK(half.sigma == doctest::Approx(spec.sigma / 2.0));

  GaussianNoiseSpec wide = gaussian_spec(1.0, 1e-5, std::sqrt(2.0));
  GaussianNoiseSpec narrow = gaussian_spec(1.0, 1e-5, std::sqrt(2.0) / 2.0);
  CHECK(wide.sigma / narrow.sigma == doctest::Approx(2.0));

  CHECK_THROWS_AS(gaussian_spec(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("gaussian_spec invariant over random parameters") {
  auto rng = make_rng(5, "priv-gspec");
  std::uniform_real_distribution<double> ue(0.01, 8.0), ud(-12.0, -1.0);
  for (int i = 0; i < 1000; ++i) {
    double eps = ue(rng), delta = std::pow(10.0, ud(rng));
    GaussianNoiseSpec spec = gaussian_spec(eps, delta, 0.5 + ue(rng));
    CHECK(spec.c_g * spec.c_g > 2.0 * std::log(1.25 / delta));
  }
}

TEST_CASE("gaussian_perturb empirical moments") {
  GaussianNoiseSpec spec = gaussian_spec(1.0, 1e-5, 1.0);
  auto rng = make_rng(64, "priv-perturb");
  const int draws = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    Point v = gaussian_perturb({0.0}, spec, rng);
    sum += v[0];
    sumsq += v[0] * v[0];
  }
  double mean = sum / draws;
  double stddev = std::sqrt(sumsq / draws - mean * mean);
  CHECK(stddev == doctest::Approx(spec.sigma).epsilon(0.02));
  CHECK(std::abs(mean) <= 4.0 * spec.sigma / std::sqrt(static_cast<double>(draws)));

  // sigma -> 0 limit leaves the vector unchanged.
  GaussianNoiseSpec zero = spec;
  zero.sigma = 0.0;
  CHECK(gaussian_perturb({0.25, -0.5}, zero, rng) == Point{0.25, -0.5});
}

TEST_CASE("split_budget tables") {
  // Algorithm 1 at n = 1024 (L = 10): 20 equal-epsilon calls of 0.05 each.
  BudgetScheme alg1 = split_budget_alg1({1.0, 1e-6}, 10);
  CHECK(alg1.shares.at("ph").per_call.epsilon == doctest::Approx(0.05));
  CHECK(alg1.shares.at("pso").per_call.epsilon == doctest::Approx(0.05));
  CHECK(alg1.total().epsilon == doctest::Approx(1.0));
  CHECK(alg1.total().delta == doctest::Approx(1e-6));

  // Algorithm 2: four round shares of eps/4 each.
  BudgetScheme alg2 = split_budget_alg2({1.0, 1e-6}, 12, 1000.0);
  double round2_eps = alg2.shares.at("bh").per_call.epsilon * alg2.shares.at("bh").calls +
                      alg2.shares.at("bso").per_call.epsilon * alg2.shares.at("bso").calls;
  CHECK(round2_eps == doctest::Approx(0.25));
  CHECK(alg2.shares.at("cch").per_call.epsilon == doctest::Approx(0.25));
  CHECK(alg2.total().epsilon == doctest::Approx(1.0));
  CHECK(alg2.total().delta == doctest::Approx(1e-6));

  // Degenerate scheme requesting 2x the budget is rejected.
  BudgetScheme bad = alg1;
  bad.shares["extra"] = {{1.0, 0.0}, 1.0, 1};
  CHECK_THROWS_AS(validate_scheme(bad, {1.0, 1e-6}), std::invalid_argument);
}

TEST_CASE("ledger soundness and multiplicities") {
  AgentLedgerSet ledger(3, {1.0, 1e-6});
  ledger.charge_all(1, {0.25, 0.0});
  ledger.charge_all(1, {0.25, 5e-7}, 1.0);
  ledger.charge_all(2, {0.05, 0.0}, 10.0);
  PrivacyBudget total = ledger.composed(0);
  CHECK(total.epsilon == doctest::Approx(1.0));
  CHECK(total.delta == doctest::Approx(5e-7));
  CHECK(ledger.charge_count(0) == doctest::Approx(12.0));
  CHECK(ledger.rounds_charged(0) == std::vector<int>{1, 2});
  CHECK_THROWS_AS(ledger.charge(0, 3, {0.5, 0.0}), std::runtime_error);
}

TEST_SUITE_END();
