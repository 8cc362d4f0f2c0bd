#include "ldpkm/one_round.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_map>

#include "ldpkm/common.hpp"

namespace ldpkm {

namespace {

struct MaxEntry {
  GridPoint g;
  std::string key;
  double ph = 0.0;   // raw histogram value at pick time
  Point pso;         // raw sum-oracle value at pick time
  double queries = 1.0;
};

std::int64_t grid_coord_bound(double unit) {
  return static_cast<std::int64_t>(std::ceil(1.0 / unit)) + 1;
}

}  // namespace

Alg1Params make_alg1_params(std::size_t k, double epsilon, double delta, double alpha, double beta,
                            std::size_t n, std::uint64_t seed) {
  require(alpha > 0.0 && alpha < 0.5, "alg1: alpha must be in (0, 1/2)");
  require(n >= k && n >= 2, "alg1: need n >= max(k, 2)");
  Alg1Params p;
  p.k = k;
  p.epsilon = epsilon;
  p.delta = delta;
  p.alpha = alpha;
  p.beta = beta;
  p.n = n;
  p.levels = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
  p.levels = std::max<std::size_t>(p.levels, 1);
  p.ng_cap = 20 * k;
  p.greedy_picks = static_cast<std::size_t>(
      std::ceil(2.0 * static_cast<double>(p.ng_cap) * std::log(1.0 / alpha)));
  p.greedy_picks = std::max<std::size_t>(p.greedy_picks, 1);
  p.budgets = split_budget_alg1({epsilon, delta}, p.levels);
  p.seed = seed;
  p.kmeans.seed = mix2(seed, fnv1a("alg1-kmeans"));
  return p;
}

Alg1Interaction run_interaction(const std::vector<Agent>& agents, const DomainMap& map,
                                const Alg1Params& params, AgentLedgerSet* ledger, RoundLog& log) {
  const std::size_t n = agents.size();
  require(n >= 1, "alg1: no agents");
  const std::size_t L = params.levels;
  const std::size_t d = map.output_dim();

  Alg1Interaction out;
  out.map = map;
  out.reduced_points.reserve(n);
  for (const Agent& a : agents) out.reduced_points.push_back(apply_map(map, a.point));

  std::vector<Point> originals;
  originals.reserve(n);
  for (const Agent& a : agents) originals.push_back(a.point);

  const auto& ph_share = params.budgets.shares.at("ph");
  const auto& pso_share = params.budgets.shares.at("pso");
  double call_beta = params.beta / (2.0 * static_cast<double>(L));

  for (std::size_t l = 1; l <= L; ++l) {
    GridSpec spec = make_grid_spec(l, L, params.alpha, d);
    std::vector<std::string> values;
    values.reserve(n);
    for (const Point& q : out.reduced_points) values.push_back(grid_key(floor_to_grid(q, spec)));

    std::int64_t bound = grid_coord_bound(spec.unit);
    TupleCodec codec(std::to_string(l), d, -bound, bound);

    BitstogramOptions hopts;
    hopts.epsilon = params.noiseless ? 1.0 : ph_share.per_call.epsilon;
    hopts.beta = call_beta;
    hopts.seed = mix3(params.seed, fnv1a("alg1-ph"), l);
    hopts.private_seed = mix3(params.seed, fnv1a("alg1-ph-private"), l);
    hopts.round_id = 1;
    hopts.noiseless = params.noiseless;
    hopts.codec = &codec;
    out.histograms.push_back(bitstogram_round(values, params.noiseless ? nullptr : ledger, hopts));

    SumOracleOptions sopts;
    sopts.epsilon = pso_share.per_call.epsilon;
    sopts.delta = pso_share.per_call.delta;
    sopts.beta = call_beta;
    sopts.seed = mix3(params.seed, fnv1a("alg1-pso"), l);
    sopts.private_seed = mix3(params.seed, fnv1a("alg1-pso-private"), l);
    sopts.round_id = 1;
    sopts.noiseless = params.noiseless;
    // g = identity on B(0,1): diameter 2, worst-case swap sensitivity 2.
    out.oracles.push_back(heavy_sums_round(values, originals, 2.0, 2.0,
                                           params.noiseless ? nullptr : ledger, sopts));
  }

  PrivacyBudget per_agent =
      params.noiseless ? PrivacyBudget{0.0, 0.0} : params.budgets.total();
  log.note(1, "interaction", 2.0 * static_cast<double>(L), per_agent);
  return out;
}

Alg1Proxy build_proxy(const Alg1Interaction& interaction, const Alg1Params& params) {
  const std::size_t L = params.levels;
  const std::size_t d = interaction.map.output_dim();
  Alg1Proxy out;
  out.levels.reserve(L);

  std::vector<MaxEntry> maximal;  // M*_{l-1} entering each loop iteration

  for (std::size_t l = 1; l <= L; ++l) {
    GridSpec spec = make_grid_spec(l, L, params.alpha, d);
    const SuccinctHistogram& ph = interaction.histograms[l - 1];
    const SumOracle& pso = interaction.oracles[l - 1];

    // Adjusted Count over candidate grid points: histogram entries plus the
    // coarsenings of maximal points (those may need subtraction even when the
    // coarse key itself was not recovered).
    std::map<std::string, double> count;
    std::unordered_map<std::string, std::vector<const MaxEntry*>> subtracted;
    for (const auto& e : ph.entries()) {
      auto g = grid_parse(e.value);
      if (!g || g->level != l || g->coords.size() != d) continue;
      count[e.value] = e.estimate;
    }
    for (const MaxEntry& m : maximal) {
      GridSpec from = make_grid_spec(m.g.level, L, params.alpha, d);
      std::string key = grid_key(coarsen(m.g, from, spec));
      auto it = count.find(key);
      if (it == count.end()) it = count.emplace(key, ph.raw_query(key)).first;
      it->second -= m.ph;
      subtracted[key].push_back(&m);
    }

    // Greedy picks: largest adjusted Count, ties by lexicographic grid key
    // (std::map iteration order makes the tie-break deterministic).
    std::vector<std::pair<std::string, double>> ranked(count.begin(), count.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::size_t picks = std::min<std::size_t>(params.greedy_picks, ranked.size());

    LevelState state;
    state.level = l;
    state.picked.reserve(picks);
    std::unordered_map<std::string, std::size_t> picked_keys;
    for (std::size_t i = 0; i < picks; ++i) {
      const auto& [key, adj] = ranked[i];
      auto g = grid_parse(key);
      PickedPoint pp;
      pp.g = *g;
      pp.adjusted_count = adj;
      pp.raw_count = ph.raw_query(key);
      pp.raw_sum = pso.query(key);
      pp.adjusted_sum = pp.raw_sum;
      pp.query_count = 1.0;
      auto sit = subtracted.find(key);
      if (sit != subtracted.end()) {
        for (const MaxEntry* m : sit->second) {
          add_inplace(pp.adjusted_sum, m->pso, -1.0);
          pp.query_count += m->queries;
        }
      }
      picked_keys.emplace(key, state.picked.size());
      state.picked.push_back(std::move(pp));
    }

    // Maximal set update: drop members covered by this level's picks, then
    // admit the picks themselves with their raw values.
    std::vector<MaxEntry> next;
    next.reserve(maximal.size() + picks);
    for (MaxEntry& m : maximal) {
      GridSpec from = make_grid_spec(m.g.level, L, params.alpha, d);
      if (picked_keys.count(grid_key(coarsen(m.g, from, spec)))) continue;
      next.push_back(std::move(m));
    }
    for (const PickedPoint& pp : state.picked) {
      MaxEntry m;
      m.g = pp.g;
      m.key = grid_key(pp.g);
      m.ph = pp.raw_count;
      m.pso = pp.raw_sum;
      m.queries = pp.query_count;
      next.push_back(std::move(m));
    }
    maximal = std::move(next);
    if (maximal.size() > l * std::max<std::size_t>(params.greedy_picks, 1)) {
      out.warnings.push_back("maximal set size bound exceeded at level " + std::to_string(l));
    }
    out.levels.push_back(std::move(state));
  }

  // D*: picked points weighted by clamped counts.
  for (const LevelState& st : out.levels) {
    GridSpec spec = make_grid_spec(st.level, L, params.alpha, d);
    for (const PickedPoint& pp : st.picked) {
      out.proxy.centers.push_back(grid_decode(pp.g, spec));
      out.proxy.weights.push_back(std::max(pp.adjusted_count, 0.0));
    }
  }
  return out;
}

Alg1Recovery recover_centers(const Alg1Proxy& proxy, const Alg1Interaction& interaction,
                             const Alg1Params& params, std::size_t original_dim) {
  Alg1Recovery out;
  double total_weight = 0.0;
  for (double w : proxy.proxy.weights) total_weight += w;
  if (proxy.proxy.centers.empty() || total_weight <= 0.0) {
    out.warnings.push_back("empty proxy dataset: sentinel centers returned");
    out.centers.centers.assign(params.k, Point(original_dim, 0.0));
    return out;
  }

  out.reduced_centers =
      standard_kmeans(proxy.proxy.centers, proxy.proxy.weights, params.k, params.kmeans);

  std::vector<double> agg_count(params.k, 0.0);
  std::vector<Point> agg_sum(params.k, Point(original_dim, 0.0));
  std::vector<double> agg_queries(params.k, 0.0);

  std::size_t d = interaction.map.output_dim();
  for (const LevelState& st : proxy.levels) {
    GridSpec spec = make_grid_spec(st.level, params.levels, params.alpha, d);
    for (const PickedPoint& pp : st.picked) {
      Point loc = grid_decode(pp.g, spec);
      std::size_t j = assign({loc}, out.reduced_centers)[0];
      agg_count[j] += std::max(pp.adjusted_count, 0.0);
      add_inplace(agg_sum[j], pp.adjusted_sum);
      agg_queries[j] += pp.query_count;
    }
  }

  double sigma = interaction.oracles.empty() ? 0.0 : interaction.oracles.front().sigma();
  double n = static_cast<double>(interaction.reduced_points.size());
  out.centers.centers.resize(params.k, Point(original_dim, 0.0));
  for (std::size_t j = 0; j < params.k; ++j) {
    if (agg_count[j] <= 1.0) {
      out.warnings.push_back("cluster " + std::to_string(j) + ": zero count, sentinel center");
      continue;
    }
    Point mu = scaled(agg_sum[j], 1.0 / agg_count[j]);
    // Known estimator noise: each folded query carries sigma*sqrt(n) noise per
    // coordinate; shrink noise-dominated estimates toward the domain center.
    double per_coord_var = sigma * sigma * n * agg_queries[j] / (agg_count[j] * agg_count[j]);
    double noise_var_total = per_coord_var * static_cast<double>(original_dim);
    double norm2 = 0.0;
    for (double v : mu) norm2 += v * v;
    double factor = norm2 > 0.0 ? std::max(0.0, 1.0 - noise_var_total / norm2) : 0.0;
    for (double& v : mu) v *= factor;
    out.centers.centers[j] = project_to_ball(std::move(mu), 1.0);
  }
  return out;
}

Alg1Result one_round_kmeans(const std::vector<Agent>& agents, const Alg1Params& params,
                            AgentLedgerSet* ledger) {
  auto t0 = std::chrono::steady_clock::now();
  require(!agents.empty(), "alg1: no agents");
  const std::size_t d_prime = agents.front().point.size();

  Alg1Result result;
  DomainMap map = make_domain_map_alg1(d_prime, params.k, params.alpha, params.beta, params.n,
                                       mix2(params.seed, fnv1a("alg1-map")), params.c_dim,
                                       params.c_s);
  result.map = map;

  Alg1Interaction interaction;
  std::vector<ProtocolRound> rounds;
  rounds.push_back({1, "interaction", [&] {
                      interaction = run_interaction(agents, map, params, ledger, result.log);
                    }});
  run_rounds(rounds);

  result.proxy = build_proxy(interaction, params);
  Alg1Recovery rec = recover_centers(result.proxy, interaction, params, d_prime);
  result.histograms = interaction.histograms;
  result.centers = rec.centers;

  for (auto& w : result.proxy.warnings) result.report.warnings.push_back(w);
  for (auto& w : rec.warnings) result.report.warnings.push_back(w);

  Dataset original;
  original.dim = d_prime;
  original.points.reserve(agents.size());
  for (const Agent& a : agents) original.points.push_back(a.point);

  result.report.private_cost = clustering_cost(original, result.centers);
  CenterSet baseline = standard_kmeans(original, params.k, params.kmeans);
  result.report.baseline_cost = clustering_cost(original, baseline);
  result.report.opt_estimate = result.report.baseline_cost;
  PrivacyBudget spent = params.noiseless ? PrivacyBudget{0.0, 0.0} : params.budgets.total();
  result.report.eps_spent = spent.epsilon;
  result.report.delta_spent = spent.delta;
  result.report.rounds = result.log.round_count();
  std::size_t picks = 0;
  for (const auto& st : result.proxy.levels) picks += st.picked.size();
  result.report.candidate_count = picks;
  finalize_cost_report(result.report);
  result.report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace ldpkm
