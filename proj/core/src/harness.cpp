#include "ldpkm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ldpkm/common.hpp"

namespace ldpkm {

using nlohmann::json;

// ---------------------------------------------------------------------------
// protocol.hpp implementation
// ---------------------------------------------------------------------------

std::vector<Agent> make_agents(const Dataset& d) {
  std::vector<Agent> agents;
  agents.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) agents.push_back({i, d.points[i]});
  return agents;
}

void RoundLog::note(int round_id, std::string name, double reports_per_agent,
                    PrivacyBudget per_agent) {
  records_.push_back({round_id, std::move(name), reports_per_agent, per_agent});
}

std::vector<int> RoundLog::round_ids() const {
  std::vector<int> ids;
  for (const auto& r : records_) {
    if (std::find(ids.begin(), ids.end(), r.round_id) == ids.end()) ids.push_back(r.round_id);
  }
  return ids;
}

PrivacyBudget Transcript::total() const {
  PrivacyBudget t{0.0, 0.0};
  for (const auto& r : rounds) t = compose(t, r.charge_per_agent);
  return t;
}

std::vector<Transcript> transcripts_from(const AgentLedgerSet& ledger, const RoundLog& log) {
  std::vector<Transcript> out(ledger.num_agents());
  for (std::size_t a = 0; a < ledger.num_agents(); ++a) {
    for (int round : ledger.rounds_charged(a)) {
      RoundRecord rec;
      rec.round_id = round;
      PrivacyBudget charge{0.0, 0.0};
      for (const auto& e : ledger.entries(a)) {
        if (e.round_id != round) continue;
        charge.epsilon += e.budget.epsilon * e.count;
        charge.delta += e.budget.delta * e.count;
      }
      rec.charge_per_agent = charge;
      for (const auto& r : log.records()) {
        if (r.round_id == round) {
          rec.name = r.name;
          rec.reports_per_agent = r.reports_per_agent;
          break;
        }
      }
      out[a].rounds.push_back(rec);
    }
  }
  return out;
}

void run_rounds(std::vector<ProtocolRound>& rounds) {
  for (auto& r : rounds) r.run();  // sequential execution is the round barrier
}

std::vector<Transcript> simulate_protocol(std::size_t num_agents,
                                          std::vector<ProtocolRound>& rounds,
                                          const AgentLedgerSet& ledger, const RoundLog& log) {
  run_rounds(rounds);
  if (rounds.empty()) return std::vector<Transcript>(num_agents);
  return transcripts_from(ledger, log);
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

namespace {

// Random rotation of the simplex frame scaled so that the pairwise distance
// is exactly `separation`. The frame's centroid is displaced from the origin
// by 0.3 * separation in a random direction: a mixture whose global mean
// carries signal, like real data, rather than an artificially centered one.
std::vector<Point> simplex_means(std::size_t k, std::size_t d, double separation,
                                 std::mt19937_64& rng) {
  require(k <= d, "gen_gaussian_mixture: need k <= d_prime for the simplex frame");
  // Random orthonormal basis via Gram-Schmidt on Gaussian vectors.
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Point> basis;
  while (basis.size() < k) {
    Point v(d);
    for (double& x : v) x = g(rng);
    for (const Point& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * b[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * b[i];
    }
    double nrm = norm(v);
    if (nrm < 1e-9) continue;
    for (double& x : v) x /= nrm;
    basis.push_back(std::move(v));
  }
  // e_i frame, centered: u_i = e_i - mean(e); pairwise distance sqrt(2).
  double scale = separation / std::sqrt(2.0);
  std::vector<Point> means(k, Point(d, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double coef = (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(k);
      add_inplace(means[i], basis[j], coef * scale);
    }
  }
  Point offset(d);
  for (double& v : offset) v = g(rng);
  double on = norm(offset);
  if (on > 1e-12) {
    for (double& v : offset) v *= 0.3 * separation / on;
    for (Point& m : means) add_inplace(m, offset);
  }
  return means;
}

}  // namespace

Dataset gen_gaussian_mixture(std::size_t n, std::size_t d_prime, std::size_t k, double separation,
                             double stddev, std::uint64_t seed, MixtureTruth* truth) {
  require(n >= 1 && k >= 1, "gen_gaussian_mixture: bad sizes");
  auto rng = make_rng(seed, "mixture");
  std::vector<Point> means = simplex_means(k, d_prime, separation, rng);
  double mean_norm = 0.0;
  for (const Point& m : means) mean_norm = std::max(mean_norm, norm(m));
  // Noise beyond the ball is truncated by resampling, so only the means have
  // to sit strictly inside.
  require(mean_norm < 0.98, "gen_gaussian_mixture: separation too large for B(0,1)");

  Dataset d;
  d.dim = d_prime;
  d.points.reserve(n);
  ClusterAssignment labels(n);
  std::normal_distribution<double> g(0.0, stddev > 0.0 ? stddev : 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t which = i % k;
    labels[i] = which;
    Point p = means[which];
    if (stddev > 0.0) {
      // Truncated: resample the rare draw that would leave the unit ball.
      for (int attempt = 0; attempt < 64; ++attempt) {
        Point q = means[which];
        for (double& x : q) x += g(rng);
        if (norm(q) <= 1.0) {
          p = std::move(q);
          break;
        }
      }
    }
    d.points.push_back(std::move(p));
  }
  if (truth) {
    truth->means.centers = means;
    truth->labels = labels;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Config / CSV
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  require(algorithm == "alg1" || algorithm == "alg2" || algorithm == "baseline" ||
              algorithm == "both",
          "config: algorithm must be alg1|alg2|baseline|both");
  require(n >= 2, "config: n too small");
  require(k >= 1 && k <= n, "config: need 1 <= k <= n");
  require(epsilon > 0.0, "config: epsilon must be positive");
  require(delta >= 0.0 && delta < 1.0, "config: delta out of range");
  require(alpha > 0.0 && alpha < 0.5, "config: alpha must be in (0, 1/2)");
  require(beta > 0.0 && beta < 1.0, "config: beta out of range");
  require(c > std::sqrt(2.0), "config: c must exceed sqrt(2)");
}

namespace {

json config_to_json_obj(const ExperimentConfig& c) {
  json j;
  j["algorithm"] = c.algorithm;
  j["n"] = c.n;
  j["d_prime"] = c.d_prime;
  j["k"] = c.k;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["alpha"] = c.alpha;
  j["c"] = c.c;
  j["beta"] = c.beta;
  j["separation"] = c.separation;
  j["stddev"] = c.stddev;
  j["seed"] = c.seed;
  j["noiseless"] = c.noiseless;
  j["c_dim"] = c.c_dim;
  j["c_s"] = c.c_s;
  j["c_b"] = c.c_b;
  j["c_r"] = c.c_r;
  j["c_t"] = c.c_t;
  j["d_power"] = c.d_power;
  j["ng_cap"] = c.ng_cap;
  j["restarts"] = c.restarts;
  j["out_dir"] = c.out_dir;
  j["write_artifacts"] = c.write_artifacts;
  return j;
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open " + path);
  json j = json::parse(in);
  ExperimentConfig c;
  maybe_get(j, "algorithm", c.algorithm);
  maybe_get(j, "n", c.n);
  maybe_get(j, "d_prime", c.d_prime);
  maybe_get(j, "k", c.k);
  maybe_get(j, "epsilon", c.epsilon);
  maybe_get(j, "delta", c.delta);
  maybe_get(j, "alpha", c.alpha);
  maybe_get(j, "c", c.c);
  maybe_get(j, "beta", c.beta);
  maybe_get(j, "separation", c.separation);
  maybe_get(j, "stddev", c.stddev);
  maybe_get(j, "seed", c.seed);
  maybe_get(j, "noiseless", c.noiseless);
  maybe_get(j, "c_dim", c.c_dim);
  maybe_get(j, "c_s", c.c_s);
  maybe_get(j, "c_b", c.c_b);
  maybe_get(j, "c_r", c.c_r);
  maybe_get(j, "c_t", c.c_t);
  maybe_get(j, "d_power", c.d_power);
  maybe_get(j, "ng_cap", c.ng_cap);
  maybe_get(j, "restarts", c.restarts);
  maybe_get(j, "out_dir", c.out_dir);
  maybe_get(j, "write_artifacts", c.write_artifacts);
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_to_json_obj(config).dump(2);
}

std::string resolve_out_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("LDPKM_OUT")) return env;
  return config.out_dir;
}

std::string csv_header() {
  return "schema_version,algorithm,n,d_prime,k,epsilon,delta,alpha,c,beta,separation,stddev,"
         "seed,noiseless,c_dim,c_s,c_b,c_r,c_t,d_power,ng_cap,d_reduced,levels,candidates,"
         "rounds,eps_spent,delta_spent,private_cost,baseline_cost,opt_estimate,additive_gap,"
         "mult_ratio,runtime_ms,warnings";
}

std::string csv_row(const ExperimentRow& row) {
  std::ostringstream os;
  os.precision(12);
  const ExperimentConfig& c = row.config;
  const CostReport& r = row.report;
  os << 1 << ',' << row.algorithm << ',' << c.n << ',' << c.d_prime << ',' << c.k << ','
     << c.epsilon << ',' << c.delta << ',' << c.alpha << ',' << c.c << ',' << c.beta << ','
     << c.separation << ',' << c.stddev << ',' << c.seed << ',' << (c.noiseless ? 1 : 0) << ','
     << c.c_dim << ',' << c.c_s << ',' << c.c_b << ',' << c.c_r << ',' << c.c_t << ','
     << c.d_power << ',' << c.ng_cap << ',' << row.dim_reduced << ',' << row.levels << ','
     << r.candidate_count << ',' << r.rounds << ',' << r.eps_spent << ',' << r.delta_spent << ','
     << r.private_cost << ',' << r.baseline_cost << ',' << r.opt_estimate << ','
     << r.additive_gap << ',' << r.mult_ratio << ',' << r.runtime_ms << ',';
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    if (i) os << ';';
    std::string w = r.warnings[i];
    std::replace(w.begin(), w.end(), ',', ';');
    os << w;
  }
  return os.str();
}

Alg1Params alg1_params_from(const ExperimentConfig& config) {
  Alg1Params p = make_alg1_params(config.k, config.epsilon, config.delta, config.alpha,
                                  config.beta, config.n, config.seed);
  p.noiseless = config.noiseless;
  p.c_dim = config.c_dim;
  p.c_s = config.c_s;
  p.kmeans.restarts = config.restarts;
  if (config.ng_cap > 0) {
    p.ng_cap = config.ng_cap;
    p.greedy_picks = static_cast<std::size_t>(
        std::ceil(2.0 * static_cast<double>(p.ng_cap) * std::log(1.0 / config.alpha)));
  }
  return p;
}

Alg2Params alg2_params_from(const ExperimentConfig& config) {
  Alg2Params p = make_alg2_params(config.k, config.epsilon, config.delta, config.c, config.beta,
                                  config.n, config.seed);
  p.noiseless = config.noiseless;
  p.alpha = std::min(config.alpha, 0.49);
  p.c_dim = config.c_dim;
  p.c_b = config.c_b;
  p.c_r = config.c_r;
  p.c_t = config.c_t;
  p.d_power = config.d_power;
  p.kmeans.restarts = config.restarts;
  return p;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

std::string histogram_artifact_json(const SuccinctHistogram& h) {
  json j;
  j["type"] = "succinct_histogram";
  j["error_bound"] = h.error_bound();
  j["omission_bound"] = h.omission_bound();
  j["epsilon"] = h.epsilon_used();
  j["seed"] = h.seed();
  j["universe_bits"] = h.universe_bits();
  j["noiseless"] = h.noiseless();
  json entries = json::array();
  for (const auto& e : h.entries()) entries.push_back({{"value", e.value}, {"estimate", e.estimate}});
  j["entries"] = entries;
  return j.dump();
}

std::string oracle_artifact_json(const SumOracle& o, bool include_reports) {
  json j;
  j["type"] = "sum_oracle";
  j["seed"] = o.seed();
  j["dim"] = o.dim();
  j["agents"] = o.num_agents();
  j["sigma"] = o.sigma();
  j["diameter"] = o.diameter();
  j["sensitivity"] = o.sensitivity();
  j["noiseless"] = o.noiseless();
  if (include_reports && !o.noiseless()) j["reports"] = o.reports();
  return j.dump();
}

std::string map_artifact_json(const DomainMap& m) {
  json j;
  j["type"] = "domain_map";
  j["seed"] = m.seed;
  j["scale"] = m.scale;
  j["projection_radius"] = m.projection_radius;
  j["unit_box_embed"] = m.unit_box_embed;
  j["dim_in"] = m.jl.d_in;
  j["dim_out"] = m.jl.d_out;
  j["identity"] = m.jl.identity;
  j["shift"] = m.shift;
  return j.dump();
}

void write_run_artifacts(const std::string& dir, const ExperimentRow& row,
                         const std::vector<SuccinctHistogram>& histograms, const DomainMap& map) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(dir + "/config.json");
    out << config_to_json(row.config) << '\n';
  }
  {
    std::ofstream out(dir + "/map.json");
    out << map_artifact_json(map) << '\n';
  }
  std::ofstream out(dir + "/histograms.jsonl");
  for (const auto& h : histograms) out << histogram_artifact_json(h) << '\n';
}

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  Dataset data = gen_gaussian_mixture(config.n, config.d_prime, config.k, config.separation,
                                      config.stddev, config.seed);
  std::vector<Agent> agents = make_agents(data);
  std::vector<ExperimentRow> rows;
  std::string out_dir = resolve_out_dir(config);

  auto run_baseline = [&] {
    ExperimentRow row;
    row.algorithm = "baseline";
    row.config = config;
    auto t0 = std::chrono::steady_clock::now();
    KMeansConfig kc;
    kc.restarts = config.restarts;
    kc.seed = mix2(config.seed, fnv1a("baseline"));
    CenterSet centers = standard_kmeans(data, config.k, kc);
    row.report.baseline_cost = clustering_cost(data, centers);
    row.report.opt_estimate = row.report.baseline_cost;
    row.report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  };

  if (config.algorithm == "baseline") {
    run_baseline();
    return rows;
  }

  if (config.algorithm == "alg1" || config.algorithm == "both") {
    Alg1Params params = alg1_params_from(config);
    AgentLedgerSet ledger(config.n, {config.epsilon, config.delta});
    Alg1Result res = one_round_kmeans(agents, params, config.noiseless ? nullptr : &ledger);
    ExperimentRow row;
    row.algorithm = "alg1";
    row.config = config;
    row.report = res.report;
    row.dim_reduced = res.map.output_dim();
    row.levels = params.levels;
    if (config.noiseless) row.report.warnings.insert(row.report.warnings.begin(),
                                                     "NOISELESS MODE: no privacy guarantee");
    if (config.write_artifacts && !out_dir.empty()) {
      write_run_artifacts(out_dir + "/alg1_seed" + std::to_string(config.seed), row,
                          res.histograms, res.map);
    }
    rows.push_back(std::move(row));
  }

  if (config.algorithm == "alg2" || config.algorithm == "both") {
    Alg2Params params = alg2_params_from(config);
    AgentLedgerSet ledger(config.n, {config.epsilon, config.delta});
    Alg2Result res = low_error_kmeans(agents, params, config.noiseless ? nullptr : &ledger);
    ExperimentRow row;
    row.algorithm = "alg2";
    row.config = config;
    row.report = res.report;
    row.dim_reduced = res.map.output_dim();
    row.levels = params.levels;
    if (config.noiseless) row.report.warnings.insert(row.report.warnings.begin(),
                                                     "NOISELESS MODE: no privacy guarantee");
    if (config.write_artifacts && !out_dir.empty()) {
      write_run_artifacts(out_dir + "/alg2_seed" + std::to_string(config.seed), row,
                          res.histograms, res.map);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ldpkm
