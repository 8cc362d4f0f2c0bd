// Command-line driver: run / sweep / calibrate / verify.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ldpkm/common.hpp"
#include "ldpkm/harness.hpp"
#include "ldpkm/lsh.hpp"

using namespace ldpkm;

namespace {

void add_config_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (flags override it)");
  cmd->add_option("--algorithm", cfg.algorithm, "alg1|alg2|baseline|both");
  cmd->add_option("-n,--agents", cfg.n, "number of agents");
  cmd->add_option("-d,--dim", cfg.d_prime, "original dimension d'");
  cmd->add_option("-k,--centers", cfg.k, "number of centers");
  cmd->add_option("--epsilon", cfg.epsilon, "privacy epsilon");
  cmd->add_option("--delta", cfg.delta, "privacy delta");
  cmd->add_option("--alpha", cfg.alpha, "accuracy parameter (alg1)");
  cmd->add_option("--lsh-c", cfg.c, "LSH approximation factor c (alg2)");
  cmd->add_option("--beta", cfg.beta, "failure probability");
  cmd->add_option("--separation", cfg.separation, "mixture mean separation");
  cmd->add_option("--stddev", cfg.stddev, "mixture per-coordinate stddev");
  cmd->add_option("--seed", cfg.seed, "master seed");
  cmd->add_flag("--noiseless", cfg.noiseless, "exact functionals, no privacy");
  cmd->add_option("--c-dim", cfg.c_dim, "dimension constant");
  cmd->add_option("--c-s", cfg.c_s, "alg1 scale constant");
  cmd->add_option("--c-b", cfg.c_b, "LSH ratio-target constant");
  cmd->add_option("--c-r", cfg.c_r, "LSH repetition constant");
  cmd->add_option("--c-t", cfg.c_t, "bucket-threshold constant");
  cmd->add_option("--d-power", cfg.d_power, "heavy-cell threshold d exponent");
  cmd->add_option("--ng-cap", cfg.ng_cap, "alg1 candidate cap N_G (0 = default)");
  cmd->add_option("--restarts", cfg.restarts, "k-means restarts");
  cmd->add_option("--out-dir", cfg.out_dir, "artifact directory (env LDPKM_OUT overrides)");
  cmd->add_flag("--artifacts", cfg.write_artifacts, "write round artifacts");
}

ExperimentConfig resolve_config(const CLI::App* cmd, ExperimentConfig flags,
                                const std::string& config_path) {
  if (config_path.empty()) return flags;
  ExperimentConfig cfg = config_from_json_file(config_path);
  // Flags given explicitly on the command line win over the file.
  auto touched = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (touched("--algorithm")) cfg.algorithm = flags.algorithm;
  if (touched("--agents")) cfg.n = flags.n;
  if (touched("--dim")) cfg.d_prime = flags.d_prime;
  if (touched("--centers")) cfg.k = flags.k;
  if (touched("--epsilon")) cfg.epsilon = flags.epsilon;
  if (touched("--delta")) cfg.delta = flags.delta;
  if (touched("--alpha")) cfg.alpha = flags.alpha;
  if (touched("--lsh-c")) cfg.c = flags.c;
  if (touched("--beta")) cfg.beta = flags.beta;
  if (touched("--separation")) cfg.separation = flags.separation;
  if (touched("--stddev")) cfg.stddev = flags.stddev;
  if (touched("--seed")) cfg.seed = flags.seed;
  if (touched("--noiseless")) cfg.noiseless = flags.noiseless;
  if (touched("--c-dim")) cfg.c_dim = flags.c_dim;
  if (touched("--c-s")) cfg.c_s = flags.c_s;
  if (touched("--c-b")) cfg.c_b = flags.c_b;
  if (touched("--c-r")) cfg.c_r = flags.c_r;
  if (touched("--c-t")) cfg.c_t = flags.c_t;
  if (touched("--d-power")) cfg.d_power = flags.d_power;
  if (touched("--ng-cap")) cfg.ng_cap = flags.ng_cap;
  if (touched("--restarts")) cfg.restarts = flags.restarts;
  if (touched("--out-dir")) cfg.out_dir = flags.out_dir;
  if (touched("--artifacts")) cfg.write_artifacts = flags.write_artifacts;
  return cfg;
}

void emit_rows(const std::vector<ExperimentRow>& rows, const std::string& csv_path,
               bool print_header) {
  if (!csv_path.empty()) {
    bool exists = std::filesystem::exists(csv_path);
    std::ofstream out(csv_path, std::ios::app);
    if (!exists) out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_row(r) << '\n';
  }
  if (print_header) std::cout << csv_header() << '\n';
  for (const auto& r : rows) std::cout << csv_row(r) << '\n';
}

int cmd_calibrate() {
  std::cout << "frozen constants:\n"
            << "  kFreqEstConst        = " << kFreqEstConst << "\n"
            << "  kFreqOmitConst       = " << kFreqOmitConst << "\n"
            << "  kEstimationFraction  = " << kEstimationFraction << "\n"
            << "  kLshFloorConst       = " << kLshFloorConst << "\n\n";

  // Re-measure the frequency-oracle constants on a planted instance.
  const std::size_t n = 20000;
  const double eps = 2.0;
  U64Codec codec(20);
  double worst_rel_err = 0.0;
  std::size_t recovered = 0, trials = 10;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<std::string> values;
    values.reserve(n);
    auto rng = make_rng(900 + trial, "calibrate");
    std::uniform_int_distribution<std::uint64_t> uni(0, (1ULL << 20) - 1);
    std::size_t planted = static_cast<std::size_t>(
        0.9 * bitstogram_omission_bound(n, 20, eps, 0.05, 4096));
    planted = std::min(planted, n / 2);
    for (std::size_t i = 0; i < planted; ++i) values.push_back("777");
    while (values.size() < n) values.push_back(std::to_string(uni(rng)));
    AgentLedgerSet ledger(n, {eps, 0.0});
    BitstogramOptions opts;
    opts.epsilon = eps;
    opts.seed = mix2(42, trial);
    opts.private_seed = mix2(43, trial);
    opts.codec = &codec;
    SuccinctHistogram h = bitstogram_round(values, &ledger, opts);
    if (h.contains("777")) {
      ++recovered;
      double err = std::abs(h.raw_query("777") - static_cast<double>(planted));
      worst_rel_err = std::max(worst_rel_err, err / h.error_bound());
    }
  }
  std::cout << "frequency oracle: planted value at 0.9*M recovered in " << recovered << "/"
            << trials << " trials; worst |err|/E = " << worst_rel_err << "\n";

  // LSH floor-constant envelope over the supported target range.
  double floor_margin = 1e9;
  for (double c : {2.0, 2.5, 3.0, 4.0}) {
    for (double b : {2.0, 10.0, 100.0, 1000.0, 4096.0}) {
      CollisionProfile p = tune_t(b, c);
      double fl = lsh_floor_p1(b, c);
      if (fl > 0.0) floor_margin = std::min(floor_margin, p.p1 / fl);
    }
  }
  std::cout << "lsh floor: min achieved p1 / floor over grid = " << floor_margin
            << " (must stay >= 1)\n";
  return floor_margin >= 1.0 && recovered >= trials - 1 ? 0 : 1;
}

int cmd_verify() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << '\n';
    if (!ok) ++failures;
  };

  // Budget accounting end to end on a small instance.
  {
    ExperimentConfig cfg;
    cfg.algorithm = "both";
    cfg.n = 512;
    cfg.k = 2;
    cfg.d_prime = 4;
    cfg.epsilon = 1.0;
    cfg.delta = 1e-6;
    cfg.seed = 7;
    auto rows = run_experiment(cfg);
    bool ok = rows.size() == 2;
    for (const auto& r : rows) {
      ok = ok && std::abs(r.report.eps_spent - cfg.epsilon) < 1e-6 * cfg.epsilon;
    }
    check(ok, "ledger composes to configured budget (alg1 + alg2, n=512)");
    check(rows.size() == 2 && rows[0].report.rounds == 1 && rows[1].report.rounds == 4,
          "round counts: alg1 = 1, alg2 = 4");
  }

  // Gaussian mechanism calibration invariant.
  {
    bool ok = true;
    auto rng = make_rng(5, "verify-gauss");
    std::uniform_real_distribution<double> ue(0.05, 4.0), ud(-9.0, -2.0);
    for (int i = 0; i < 200; ++i) {
      double eps = ue(rng), delta = std::pow(10.0, ud(rng));
      GaussianNoiseSpec spec = gaussian_spec(eps, delta, 1.0);
      ok = ok && spec.c_g * spec.c_g > 2.0 * std::log(1.25 / delta);
    }
    check(ok, "gaussian_spec strictly satisfies c_G^2 > 2 ln(1.25/delta)");
  }

  // LSH tuner sanity.
  {
    bool ok = true;
    for (double b : {10.0, 100.0}) {
      for (double c : {2.0, 3.0}) {
        CollisionProfile p = tune_t(b, c);
        double ratio = std::pow(atom_collision_prob(p.width, 1.0), 2.0 * p.t) /
                       std::pow(atom_collision_prob(p.width, c), static_cast<double>(p.t));
        ok = ok && ratio >= b * (1.0 - 1e-9);
      }
    }
    check(ok, "tune_t profiles re-verified against the atom closed form");
  }

  std::cout << (failures == 0 ? "verify: all invariants hold\n"
                              : "verify: FAILURES present\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally differentially private k-means simulator"};
  app.require_subcommand(1);

  ExperimentConfig run_cfg;
  std::string run_config_path, run_csv;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_config_flags(run, run_cfg, run_config_path);
  run->add_option("--csv", run_csv, "append rows to this CSV file");

  ExperimentConfig sweep_cfg;
  std::string sweep_config_path, sweep_csv;
  std::vector<std::size_t> sweep_n;
  std::vector<std::uint64_t> sweep_seeds;
  CLI::App* sweep = app.add_subcommand("sweep", "sweep over n and seeds");
  add_config_flags(sweep, sweep_cfg, sweep_config_path);
  sweep->add_option("--sweep-n", sweep_n, "agent counts to sweep")->required();
  sweep->add_option("--sweep-seeds", sweep_seeds, "seeds to sweep")->required();
  sweep->add_option("--csv", sweep_csv, "append rows to this CSV file");

  CLI::App* calibrate = app.add_subcommand("calibrate", "re-measure frozen constants");
  CLI::App* verify = app.add_subcommand("verify", "run the invariant battery");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = resolve_config(run, run_cfg, run_config_path);
      emit_rows(run_experiment(cfg), run_csv, true);
      return 0;
    }
    if (sweep->parsed()) {
      ExperimentConfig cfg = resolve_config(sweep, sweep_cfg, sweep_config_path);
      bool first = true;
      for (std::size_t n : sweep_n) {
        for (std::uint64_t seed : sweep_seeds) {
          ExperimentConfig c = cfg;
          c.n = n;
          c.seed = seed;
          emit_rows(run_experiment(c), sweep_csv, first);
          first = false;
        }
      }
      return 0;
    }
    if (calibrate->parsed()) return cmd_calibrate();
    if (verify->parsed()) return cmd_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
