#include "ldpkm/four_round.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "ldpkm/common.hpp"

namespace ldpkm {

std::vector<double> opt_guesses(std::size_t n, std::size_t k) {
  require(n >= 1 && k >= 1, "opt_guesses: bad arguments");
  double base = static_cast<double>(k) * std::sqrt(static_cast<double>(n));
  double top = static_cast<double>(n);
  if (base >= top) return {top};
  std::size_t f_max = static_cast<std::size_t>(std::ceil(std::log2(top / base)));
  std::vector<double> out;
  for (std::size_t f = 0; f <= f_max; ++f) out.push_back(base * std::ldexp(1.0, static_cast<int>(f)));
  return out;
}

Alg2Params make_alg2_params(std::size_t k, double epsilon, double delta, double c, double beta,
                            std::size_t n, std::uint64_t seed) {
  require(c > std::sqrt(2.0), "alg2: c must exceed sqrt(2)");
  require(n >= std::max<std::size_t>(k, 4), "alg2: need n >= max(k, 4)");
  Alg2Params p;
  p.k = k;
  p.epsilon = epsilon;
  p.delta = delta;
  p.beta = beta;
  p.c = c;
  p.n = n;
  p.seed = seed;
  p.levels = std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))), 2);
  p.guesses = opt_guesses(n, k);
  p.kmeans.seed = mix2(seed, fnv1a("alg2-kmeans"));
  return p;
}

void derive_alg2(Alg2Params& p, std::size_t dim_reduced) {
  p.dim_reduced = dim_reduced;
  double d = static_cast<double>(dim_reduced);
  double L = static_cast<double>(p.levels);
  p.scales = 1 + static_cast<std::size_t>(
                     std::ceil(std::log2(std::max(std::pow(d, 1.5) * std::sqrt(L), 2.0))));

  double eps_ch = (p.epsilon / 4.0) / static_cast<double>(p.levels - 1);
  double log_n = std::log2(static_cast<double>(p.n));
  p.ratio_target =
      std::max(1.0001, p.c_b * static_cast<double>(p.k) * std::pow(log_n, 3.0) /
                           (eps_ch * p.beta * p.beta));
  p.profile = tune_t(p.ratio_target, p.c);

  double f_count = static_cast<double>(p.guesses.size());
  double m_count = static_cast<double>(p.scales);
  p.reps = std::ceil(p.c_r *
                     std::log(static_cast<double>(p.k) * L * L * m_count * f_count / p.beta) /
                     std::max(p.profile.p1, 1e-300));
  p.reps = std::max(p.reps, 1.0);

  double pair_calls = f_count * (L - 1.0) * m_count * p.reps;
  p.budgets = split_budget_alg2({p.epsilon, p.delta}, p.levels - 1, pair_calls);
}

Alg2Round1 round1_cell_histograms(const std::vector<Agent>& agents, const DomainMap& map,
                                  const Alg2Params& params, AgentLedgerSet* ledger, RoundLog& log) {
  require(!agents.empty(), "alg2: no agents");
  Alg2Round1 out;
  out.map = map;
  out.reduced_points.reserve(agents.size());
  for (const Agent& a : agents) out.reduced_points.push_back(apply_map(map, a.point));

  const std::size_t L = params.levels;
  const std::size_t d = map.output_dim();
  const auto& share = params.budgets.shares.at("ch");
  for (std::size_t l = 1; l < L; ++l) {
    std::vector<std::string> values;
    values.reserve(agents.size());
    for (const Point& x : out.reduced_points) values.push_back(cell_key(cell_of(x, l)));
    std::int64_t box = (static_cast<std::int64_t>(1) << std::min<std::size_t>(l, 62)) - 1;
    TupleCodec codec(std::to_string(l), d, 0, box);
    BitstogramOptions opts;
    opts.epsilon = params.noiseless ? 1.0 : share.per_call.epsilon;
    opts.beta = params.beta / static_cast<double>(L);
    opts.seed = mix3(params.seed, fnv1a("alg2-ch"), l);
    opts.private_seed = mix3(params.seed, fnv1a("alg2-ch-private"), l);
    opts.round_id = 1;
    opts.noiseless = params.noiseless;
    opts.codec = &codec;
    opts.buckets = params.histogram_buckets;
    out.histograms.push_back(bitstogram_round(values, params.noiseless ? nullptr : ledger, opts));
  }
  PrivacyBudget per_agent = params.noiseless
                                ? PrivacyBudget{0.0, 0.0}
                                : PrivacyBudget{params.epsilon / 4.0, 0.0};
  log.note(1, "cell-histograms", static_cast<double>(L - 1), per_agent);
  return out;
}

GuessContext make_guess_context(const Alg2Round1& round1, const Alg2Params& params, std::size_t f,
                                std::vector<std::string>* warnings) {
  GuessContext ctx;
  ctx.f = f;
  ctx.opt_guess = params.guesses.at(f);
  HeavyMarkerParams hp;
  hp.beta = params.beta;
  hp.k = params.k;
  hp.d_power = params.d_power;
  ctx.labels = mark_heavy_light(round1.histograms, ctx.opt_guess, params.k, params.beta,
                                params.levels, round1.map.output_dim(), hp, warnings);
  return ctx;
}

double bucket_threshold(const Alg2Params& params, double opt_guess, std::size_t level) {
  double t = cell_side(level);
  double d = static_cast<double>(params.dim_reduced);
  double L = static_cast<double>(params.levels);
  double p1 = params.profile.p1;
  double branch1 = params.beta * opt_guess / (t * t * static_cast<double>(params.k) * L * L * d);
  double branch2 = 0.0;
  double branch3 = 0.0;
  if (!params.noiseless) {
    const auto& bh = params.budgets.shares.at("bh");
    const auto& bso = params.budgets.shares.at("bso");
    std::size_t universe_bits = 16 * std::max<std::size_t>(params.profile.t, 1);
    double bh_m = bitstogram_omission_bound(params.n, universe_bits, bh.per_call.epsilon,
                                            params.beta, params.histogram_buckets);
    branch2 = 4.0 * bh_m / p1;
    double cg = std::sqrt(2.0 * std::log(1.25 / std::max(bso.per_call.delta, 1e-290)));
    branch3 = params.c_t * (cg / bso.per_call.epsilon) *
              std::sqrt(static_cast<double>(params.n) *
                        std::log(static_cast<double>(params.n) / params.beta));
  }
  return (p1 / 2.0) * std::max({branch1, branch2, branch3});
}

namespace {

double round2_bh_omission(const Alg2Params& params) {
  if (params.noiseless) return 0.0;
  const auto& bh = params.budgets.shares.at("bh");
  std::size_t universe_bits = 16 * std::max<std::size_t>(params.profile.t, 1);
  return bitstogram_omission_bound(params.n, universe_bits, bh.per_call.epsilon, params.beta,
                                   params.histogram_buckets);
}

}  // namespace

BucketRound round2_single_call(const std::vector<std::optional<Point>>& images,
                               const SyntheticSpace& space, double scale_r, std::size_t m_index,
                               std::size_t rep_index, std::size_t f, const Alg2Params& params,
                               AgentLedgerSet* ledger) {
  BucketRound out;
  std::string prefix = "(" + std::to_string(space.level) + "," + std::to_string(m_index) + "," +
                       std::to_string(rep_index) + "," + std::to_string(f) + ")";
  std::uint64_t call_seed =
      mix3(params.seed, fnv1a("alg2-lsh"), mix3(space.level, m_index, mix2(rep_index, f)));
  out.fn = LshFunction(params.profile, space.synth_dim(), scale_r, call_seed, prefix);

  const std::size_t n = images.size();
  std::vector<std::string> values(n);
  std::vector<Point> g_values(n, Point(space.synth_dim(), 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    if (images[j]) {
      values[j] = out.fn.hash(*images[j]);
      g_values[j] = *images[j];
    } else {
      values[j] = out.fn.bottom();
    }
  }

  const auto& bh_share = params.budgets.shares.at("bh");
  const auto& bso_share = params.budgets.shares.at("bso");

  BitstogramOptions hopts;
  hopts.epsilon = params.noiseless ? 1.0 : bh_share.per_call.epsilon;
  hopts.beta = params.beta;
  hopts.seed = mix2(call_seed, fnv1a("bh"));
  hopts.private_seed = mix2(call_seed, fnv1a("bh-private"));
  hopts.round_id = 2;
  hopts.noiseless = params.noiseless;
  std::vector<std::string> candidates;
  if (!params.noiseless) {
    candidates = out.fn.enumerate_buckets(space.radius_bound());
    require(!candidates.empty(),
            "round2_single_call: bucket universe too large for candidate scan");
    hopts.candidates = &candidates;
  }
  out.histogram = bitstogram_round(values, params.noiseless ? nullptr : ledger, hopts);

  SumOracleOptions sopts;
  sopts.epsilon = bso_share.per_call.epsilon;
  sopts.delta = bso_share.per_call.delta;
  sopts.beta = params.beta;
  sopts.seed = mix2(call_seed, fnv1a("bso"));
  sopts.private_seed = mix2(call_seed, fnv1a("bso-private"));
  sopts.round_id = 2;
  sopts.noiseless = params.noiseless;
  double rb = space.radius_bound();
  out.oracle = heavy_sums_round(values, g_values, 2.0 * rb, 2.0 * rb,
                                params.noiseless ? nullptr : ledger, sopts);
  return out;
}

CenterSet BiCriteriaSolution::as_center_set() const {
  CenterSet s;
  s.centers = centers;
  return s;
}

Alg2Round2 round2_lsh(const std::vector<Agent>& agents, const Alg2Round1& round1,
                      const std::vector<GuessContext>& contexts, const Alg2Params& params,
                      AgentLedgerSet* ledger, RoundLog& log,
                      std::vector<std::string>* warnings) {
  Alg2Round2 out;
  const std::size_t L = params.levels;
  const std::size_t d = round1.map.output_dim();
  const double n = static_cast<double>(agents.size());
  const double bh_m = round2_bh_omission(params);

  out.planned_pair_calls = static_cast<double>(contexts.size()) * (static_cast<double>(L) - 1.0) *
                           static_cast<double>(params.scales) * params.reps;

  // Heavy-cell centers (dedup across guesses: the same cell can be heavy for
  // several OPT guesses).
  std::unordered_set<std::string> seen_cells;
  for (const GuessContext& ctx : contexts) {
    for (std::size_t l = 0; l < L; ++l) {
      for (const CellId& c : ctx.labels.heavy_at(l)) {
        std::string key = cell_key(c);
        if (!seen_cells.insert(key).second) continue;
        out.solution.centers.push_back(cell_center(c));
        out.solution.provenance.push_back("cell:" + key);
        out.solution.heavy_cell_centers++;
      }
    }
  }

  // LSH bucket centers, guess by guess, level by level. Levels whose
  // threshold exceeds n cannot produce a qualifying bucket and are skipped
  // (their calls still count toward the privacy charge below).
  for (const GuessContext& ctx : contexts) {
    for (std::size_t l = 1; l < L; ++l) {
      CandidateAuditRow row;
      row.f = ctx.f;
      row.level = l;
      row.threshold = bucket_threshold(params, ctx.opt_guess, l);
      row.cap = static_cast<double>(params.scales) * params.reps *
                std::ceil(2.0 * n / std::max(row.threshold - 2.0 * bh_m, 1.0));
      bool has_heavy = !ctx.labels.heavy_at(l).empty();
      row.executed = row.threshold <= n && has_heavy && params.reps <= 1e6;
      if (!row.executed) {
        out.audit.push_back(row);
        continue;
      }

      SyntheticSpace space = make_synthetic_space(ctx.labels, l, params.c);
      // Participation and synthetic images depend only on (f, l); hashing
      // scale and repetition reuse them.
      std::vector<std::optional<Point>> images(agents.size());
      for (std::size_t j = 0; j < agents.size(); ++j) {
        const Point& x = round1.reduced_points[j];
        if (!ctx.labels.is_medium(cell_of(x, l))) continue;
        images[j] = lambda_map(x, space);
      }

      auto reps = static_cast<std::size_t>(params.reps);
      for (std::size_t m = 1; m <= params.scales; ++m) {
        double r_scale = std::ldexp(1.0, static_cast<int>(m)) * cell_side(l) /
                         (static_cast<double>(d) * std::sqrt(static_cast<double>(L)));
        for (std::size_t r = 1; r <= reps; ++r) {
          BucketRound call =
              round2_single_call(images, space, r_scale, m, r, ctx.f, params, ledger);
          out.executed_pair_calls += 1.0;
          const std::string bottom = call.fn.bottom();
          for (const auto& entry : call.histogram.entries()) {
            if (entry.value == bottom) continue;
            double count = call.histogram.query(entry.value);
            if (count < row.threshold) continue;
            Point sum = call.oracle.query(entry.value);
            Point avg = scaled(sum, 1.0 / count);
            Point projected = project_to_heavy_cells(avg, space);
            out.solution.centers.push_back(std::move(projected));
            out.solution.provenance.push_back("bucket:" + std::to_string(ctx.f) + "," +
                                              std::to_string(l) + "," + std::to_string(m) + "," +
                                              std::to_string(r));
            out.solution.bucket_centers++;
            row.bucket_centers++;
          }
        }
      }
      if (static_cast<double>(row.bucket_centers) > row.cap && warnings) {
        warnings->push_back("candidate cap exceeded at f=" + std::to_string(ctx.f) +
                            " level=" + std::to_string(l));
      }
      out.audit.push_back(row);
    }
  }

  // Privacy charge covers the full notional call grid; skipped calls send
  // nothing but are still paid for so the ledger composes to exactly the
  // configured budget.
  if (!params.noiseless) {
    const auto& bh_share = params.budgets.shares.at("bh");
    const auto& bso_share = params.budgets.shares.at("bso");
    double remaining = out.planned_pair_calls - out.executed_pair_calls;
    if (remaining > 0.0) {
      ledger->charge_all(2, bh_share.per_call, remaining);
      ledger->charge_all(2, bso_share.per_call, remaining);
    }
  }
  PrivacyBudget per_agent = params.noiseless
                                ? PrivacyBudget{0.0, 0.0}
                                : PrivacyBudget{params.epsilon / 4.0, params.delta / 2.0};
  log.note(2, "lsh-buckets", 2.0 * out.planned_pair_calls, per_agent);
  return out;
}

Alg2Round3 round3_proxy(const std::vector<Agent>& agents, const Alg2Round1& round1,
                        const BiCriteriaSolution& solution, const Alg2Params& params,
                        AgentLedgerSet* ledger, RoundLog& log) {
  require(!solution.centers.empty(), "round3_proxy: empty candidate set");
  Alg2Round3 out;
  CenterSet candidates = solution.as_center_set();

  std::vector<std::string> values;
  values.reserve(agents.size());
  ClusterAssignment nearest = assign(round1.reduced_points, candidates);
  for (std::size_t j = 0; j < agents.size(); ++j) {
    values.push_back("s:" + std::to_string(nearest[j]));
  }

  std::vector<std::string> scan;
  scan.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) scan.push_back("s:" + std::to_string(i));

  const auto& share = params.budgets.shares.at("cch");
  BitstogramOptions opts;
  opts.epsilon = params.noiseless ? 1.0 : share.per_call.epsilon;
  opts.beta = params.beta;
  opts.seed = mix2(params.seed, fnv1a("alg2-cch"));
  opts.private_seed = mix2(params.seed, fnv1a("alg2-cch-private"));
  opts.round_id = 3;
  opts.noiseless = params.noiseless;
  opts.candidates = &scan;
  out.cch = bitstogram_round(values, params.noiseless ? nullptr : ledger, opts);

  out.proxy.centers = candidates.centers;
  out.proxy.weights.resize(candidates.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.proxy.weights[i] = out.cch.query(scan[i]);
    total += out.proxy.weights[i];
  }
  if (total <= 0.0) {
    out.warnings.push_back("all-zero proxy weights: sentinel reduced centers");
    out.reduced_centers.centers.assign(params.k, Point(round1.map.output_dim(), 0.5));
  } else {
    out.reduced_centers =
        standard_kmeans(out.proxy.centers, out.proxy.weights, params.k, params.kmeans);
  }

  PrivacyBudget per_agent = params.noiseless ? PrivacyBudget{0.0, 0.0}
                                             : PrivacyBudget{params.epsilon / 4.0, 0.0};
  log.note(3, "candidate-histogram", 1.0, per_agent);
  return out;
}

Alg2Round4 round4_recover(const std::vector<Agent>& agents, const Alg2Round1& round1,
                          const CenterSet& reduced_centers, const Alg2Params& params,
                          AgentLedgerSet* ledger, RoundLog& log) {
  require(reduced_centers.size() == params.k, "round4_recover: |S*| must equal k");
  Alg2Round4 out;
  const std::size_t k = params.k;
  const std::size_t d_prime = agents.front().point.size();

  ClusterAssignment nearest = assign(round1.reduced_points, reduced_centers);
  std::vector<std::string> values;
  values.reserve(agents.size());
  for (std::size_t j = 0; j < agents.size(); ++j) {
    values.push_back("s:" + std::to_string(nearest[j]));
  }

  const auto& g_share = params.budgets.shares.at("gprime");
  const auto& sh_share = params.budgets.shares.at("sh");

  // One-hot block release through the Gaussian mechanism (sensitivity sqrt 2).
  std::vector<double> block_sums(k * d_prime, 0.0);
  double sigma = 0.0;
  if (!params.noiseless) {
    GaussianNoiseSpec spec =
        gaussian_spec(g_share.per_call.epsilon, g_share.per_call.delta, std::sqrt(2.0));
    sigma = spec.sigma;
  }
  for (std::size_t j = 0; j < agents.size(); ++j) {
    Point report(k * d_prime, 0.0);
    std::copy(agents[j].point.begin(), agents[j].point.end(),
              report.begin() + static_cast<std::ptrdiff_t>(nearest[j] * d_prime));
    if (!params.noiseless) {
      auto rng = make_rng(mix2(params.seed, fnv1a("alg2-gprime-private")), "agent", j);
      gaussian_perturb_inplace(report, sigma, rng);
      ledger->charge(j, 4, g_share.per_call);
    }
    for (std::size_t c = 0; c < report.size(); ++c) block_sums[c] += report[c];
  }

  std::vector<std::string> scan;
  for (std::size_t i = 0; i < k; ++i) scan.push_back("s:" + std::to_string(i));
  BitstogramOptions opts;
  opts.epsilon = params.noiseless ? 1.0 : sh_share.per_call.epsilon;
  opts.beta = params.beta;
  opts.seed = mix2(params.seed, fnv1a("alg2-sh"));
  opts.private_seed = mix2(params.seed, fnv1a("alg2-sh-private"));
  opts.round_id = 4;
  opts.noiseless = params.noiseless;
  opts.candidates = &scan;
  SuccinctHistogram sh = bitstogram_round(values, params.noiseless ? nullptr : ledger, opts);

  out.centers.centers.assign(k, Point(d_prime, 0.0));
  double n = static_cast<double>(agents.size());
  for (std::size_t j = 0; j < k; ++j) {
    double count = sh.query(scan[j]);
    if (count <= 1.0) {
      out.warnings.push_back("cluster " + std::to_string(j) + ": zero count, sentinel center");
      continue;
    }
    Point mu(d_prime);
    for (std::size_t c = 0; c < d_prime; ++c) mu[c] = block_sums[j * d_prime + c] / count;
    // Every agent adds noise to every block, so the estimator noise variance
    // per coordinate is n sigma^2 / count^2; shrink noise-dominated means.
    double noise_var_total =
        static_cast<double>(d_prime) * n * sigma * sigma / (count * count);
    double norm2 = 0.0;
    for (double v : mu) norm2 += v * v;
    double factor = norm2 > 0.0 ? std::max(0.0, 1.0 - noise_var_total / norm2) : 0.0;
    for (double& v : mu) v *= factor;
    out.centers.centers[j] = project_to_ball(std::move(mu), 1.0);
  }

  PrivacyBudget per_agent = params.noiseless
                                ? PrivacyBudget{0.0, 0.0}
                                : PrivacyBudget{params.epsilon / 4.0, params.delta / 2.0};
  log.note(4, "center-recovery", 2.0, per_agent);
  return out;
}

Alg2Result low_error_kmeans(const std::vector<Agent>& agents, const Alg2Params& params_in,
                            AgentLedgerSet* ledger) {
  auto t0 = std::chrono::steady_clock::now();
  require(!agents.empty(), "alg2: no agents");
  Alg2Params params = params_in;
  const std::size_t d_prime = agents.front().point.size();

  DomainMap map = make_domain_map_alg2(d_prime, params.k, params.alpha, params.beta,
                                       mix2(params.seed, fnv1a("alg2-map")), params.c_dim);
  if (params.dim_reduced != map.output_dim()) derive_alg2(params, map.output_dim());

  Alg2Result result;
  result.map = map;

  Alg2Round1 round1;
  Alg2Round2 round2;
  Alg2Round3 round3;
  Alg2Round4 round4;
  std::vector<GuessContext> contexts;

  std::vector<ProtocolRound> rounds;
  rounds.push_back({1, "cell-histograms", [&] {
                      round1 = round1_cell_histograms(agents, map, params, ledger, result.log);
                      for (std::size_t f = 0; f < params.guesses.size(); ++f) {
                        contexts.push_back(make_guess_context(round1, params, f,
                                                              &result.report.warnings));
                      }
                    }});
  rounds.push_back({2, "lsh-buckets", [&] {
                      round2 = round2_lsh(agents, round1, contexts, params, ledger, result.log,
                                          &result.report.warnings);
                    }});
  rounds.push_back({3, "candidate-histogram", [&] {
                      round3 = round3_proxy(agents, round1, round2.solution, params, ledger,
                                            result.log);
                    }});
  rounds.push_back({4, "center-recovery", [&] {
                      round4 = round4_recover(agents, round1, round3.reduced_centers, params,
                                              ledger, result.log);
                    }});
  run_rounds(rounds);

  result.centers = round4.centers;
  result.histograms = round1.histograms;
  result.histograms.push_back(round3.cch);
  result.bicriteria = round2.solution;
  result.audit = round2.audit;
  result.reduced_centers = round3.reduced_centers;
  for (auto& w : round3.warnings) result.report.warnings.push_back(w);
  for (auto& w : round4.warnings) result.report.warnings.push_back(w);

  Dataset original;
  original.dim = d_prime;
  original.points.reserve(agents.size());
  for (const Agent& a : agents) original.points.push_back(a.point);

  result.report.private_cost = clustering_cost(original, result.centers);
  CenterSet baseline = standard_kmeans(original, params.k, params.kmeans);
  result.report.baseline_cost = clustering_cost(original, baseline);
  result.report.opt_estimate = result.report.baseline_cost;
  PrivacyBudget spent =
      params.noiseless ? PrivacyBudget{0.0, 0.0} : PrivacyBudget{params.epsilon, params.delta};
  result.report.eps_spent = spent.epsilon;
  result.report.delta_spent = spent.delta;
  result.report.rounds = result.log.round_count();
  result.report.candidate_count = result.bicriteria.centers.size();
  finalize_cost_report(result.report);
  result.report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace ldpkm
