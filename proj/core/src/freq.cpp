#include "ldpkm/freq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "ldpkm/common.hpp"

namespace ldpkm {

namespace {

constexpr const char* kTagBucketHash = "btg-bucket-hash";
constexpr const char* kTagEstChannel = "btg-est-channel";
constexpr const char* kTagBitChannel = "btg-bit-channel";
constexpr const char* kTagChannelPick = "btg-channel-pick";
constexpr const char* kTagGroupPick = "btg-group-pick";

inline double rr_factor(double epsilon) {
  double e = std::exp(epsilon);
  return (e + 1.0) / (e - 1.0);
}

inline double sign_of(std::uint64_t h) { return (h & 1ULL) ? 1.0 : -1.0; }

// Order-sensitive fingerprint of a bit string packed LSB-first into words.
inline std::uint64_t words_key(const std::uint64_t* words, std::size_t nwords, std::size_t nbits) {
  std::uint64_t h = 0x51ed270b8468a3b1ULL ^ nbits;
  for (std::size_t w = 0; w < nwords; ++w) h = mix2(h, words[w]);
  return h;
}

inline void pack_bits(const std::vector<std::uint8_t>& bits, std::vector<std::uint64_t>& words) {
  words.assign((bits.size() + 63) / 64, 0);
  for (std::size_t b = 0; b < bits.size(); ++b) {
    words[b >> 6] |= static_cast<std::uint64_t>(bits[b] & 1) << (b & 63);
  }
}

inline std::uint64_t bits_key(const std::vector<std::uint8_t>& bits) {
  std::vector<std::uint64_t> words;
  pack_bits(bits, words);
  return words_key(words.data(), words.size(), bits.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Codecs
// ---------------------------------------------------------------------------

TupleCodec::TupleCodec(std::string prefix, std::size_t arity, std::int64_t min_value,
                       std::int64_t max_value, char sep)
    : prefix_(std::move(prefix)), arity_(arity), min_(min_value), max_(max_value), sep_(sep) {
  require(arity_ >= 1, "TupleCodec: arity must be >= 1");
  require(max_ >= min_, "TupleCodec: empty value range");
  std::uint64_t range = static_cast<std::uint64_t>(max_ - min_) + 1;
  bits_per_entry_ = std::max(1, ceil_log2(range));
}

std::size_t TupleCodec::bits() const { return arity_ * bits_per_entry_; }

bool TupleCodec::encode(const std::string& value, std::vector<std::uint8_t>& bits_out) const {
  if (value.size() <= prefix_.size() + 1 || value.compare(0, prefix_.size(), prefix_) != 0 ||
      value[prefix_.size()] != ':') {
    return false;
  }
  bits_out.assign(bits(), 0);
  const char* s = value.c_str() + prefix_.size() + 1;
  char* end = nullptr;
  for (std::size_t i = 0; i < arity_; ++i) {
    long long v = std::strtoll(s, &end, 10);
    if (end == s || v < min_ || v > max_) return false;
    std::uint64_t off = static_cast<std::uint64_t>(v - min_);
    for (std::size_t b = 0; b < bits_per_entry_; ++b) {
      bits_out[i * bits_per_entry_ + b] = static_cast<std::uint8_t>((off >> b) & 1ULL);
    }
    if (i + 1 < arity_) {
      if (*end != sep_) return false;
      s = end + 1;
    } else if (*end != '\0') {
      return false;
    }
  }
  return true;
}

std::optional<std::string> TupleCodec::decode(const std::vector<std::uint8_t>& in) const {
  if (in.size() != bits()) return std::nullopt;
  std::string out = prefix_;
  out += ':';
  for (std::size_t i = 0; i < arity_; ++i) {
    std::uint64_t off = 0;
    for (std::size_t b = 0; b < bits_per_entry_; ++b) {
      off |= static_cast<std::uint64_t>(in[i * bits_per_entry_ + b] & 1) << b;
    }
    std::int64_t v = min_ + static_cast<std::int64_t>(off);
    if (v > max_) return std::nullopt;
    if (i) out += sep_;
    out += std::to_string(v);
  }
  return out;
}

bool U64Codec::encode(const std::string& value, std::vector<std::uint8_t>& bits_out) const {
  char* end = nullptr;
  unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') return false;
  if (bits_ < 64 && v >= (1ULL << bits_)) return false;
  bits_out.assign(bits_, 0);
  for (std::size_t b = 0; b < bits_; ++b) bits_out[b] = static_cast<std::uint8_t>((v >> b) & 1ULL);
  return true;
}

std::optional<std::string> U64Codec::decode(const std::vector<std::uint8_t>& in) const {
  if (in.size() != bits_) return std::nullopt;
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < bits_; ++b) v |= static_cast<std::uint64_t>(in[b] & 1) << b;
  return std::to_string(v);
}

// ---------------------------------------------------------------------------
// SuccinctHistogram
// ---------------------------------------------------------------------------

double SuccinctHistogram::query(const std::string& v) const { return std::max(raw_query(v), 0.0); }

double SuccinctHistogram::raw_query(const std::string& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? 0.0 : entries_[it->second].estimate;
}

bool SuccinctHistogram::contains(const std::string& v) const { return index_.count(v) > 0; }

void SuccinctHistogram::set_meta(double e, double m, double eps, double beta, std::uint64_t seed,
                                 std::size_t universe_bits, bool noiseless) {
  error_ = e;
  omission_ = m;
  epsilon_ = eps;
  beta_ = beta;
  seed_ = seed;
  universe_bits_ = universe_bits;
  noiseless_ = noiseless;
}

void SuccinctHistogram::add_entry(std::string value, double estimate) {
  auto it = index_.find(value);
  if (it != index_.end()) {
    entries_[it->second].estimate = estimate;
    return;
  }
  index_[value] = entries_.size();
  entries_.push_back({std::move(value), estimate});
}

void SuccinctHistogram::sort_entries() {
  std::sort(entries_.begin(), entries_.end(),
            [](const HistogramEntry& a, const HistogramEntry& b) { return a.value < b.value; });
  index_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) index_[entries_[i].value] = i;
}

double histogram_query(const SuccinctHistogram& h, const std::string& v) { return h.query(v); }

double bitstogram_error_bound(std::size_t n, double epsilon, double beta,
                              std::size_t universe_bits, std::size_t buckets) {
  double krr = rr_factor(epsilon);
  double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  // The log term covers both estimation noise across agents and the
  // selection over enumerated candidates during decoding.
  double sel = std::max(nn, static_cast<double>(universe_bits) * static_cast<double>(buckets));
  return kFreqEstConst * krr * std::sqrt((nn / kEstimationFraction) * std::log(2.0 * sel / beta));
}

double bitstogram_omission_bound(std::size_t n, std::size_t universe_bits, double epsilon,
                                 double beta, std::size_t buckets) {
  double krr = rr_factor(epsilon);
  double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  double k = static_cast<double>(std::max<std::size_t>(universe_bits, 1));
  double logterm = std::log(2.0 * k * static_cast<double>(buckets) / beta);
  double m = kFreqOmitConst * krr * std::sqrt(nn * k * logterm / (1.0 - kEstimationFraction));
  // Wide universes need the per-bit signal to keep the expected number of
  // wrong bits inside the enumeration budget; inflate M accordingly.
  if (k > 75.0) {
    double target = 5.0 / k;  // per-bit error rate the decoder can absorb
    double z = 1.5;
    for (int it = 0; it < 60; ++it) {
      double f = std_normal_cdf(-z) - target;
      if (std::abs(f) < 1e-12) break;
      double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
      z += f / pdf;
    }
    m *= std::max(1.0, z / 1.5);
  }
  return m;
}

// ---------------------------------------------------------------------------
// bitstogram_round
// ---------------------------------------------------------------------------

namespace {

struct Channels {
  std::vector<std::uint8_t> is_est;  // per agent
  std::vector<std::uint32_t> group;  // bit position, valid for bit agents
  std::size_t n_est = 0;
};

Channels assign_channels(std::size_t n, std::uint64_t seed, std::size_t num_groups) {
  Channels ch;
  ch.is_est.resize(n);
  ch.group.resize(n);
  std::uint64_t pick_seed = mix2(seed, fnv1a(kTagChannelPick));
  std::uint64_t group_seed = mix2(seed, fnv1a(kTagGroupPick));
  std::uint64_t cut = static_cast<std::uint64_t>(kEstimationFraction * 1048576.0);
  for (std::size_t j = 0; j < n; ++j) {
    bool est = (mix2(pick_seed, j) % 1048576ULL) < cut;
    ch.is_est[j] = est ? 1 : 0;
    if (est) {
      ++ch.n_est;
    } else {
      ch.group[j] = static_cast<std::uint32_t>(mix2(group_seed, j) % num_groups);
    }
  }
  return ch;
}

}  // namespace

SuccinctHistogram bitstogram_round(const std::vector<std::string>& agent_values,
                                   AgentLedgerSet* ledger, const BitstogramOptions& options) {
  const std::size_t n = agent_values.size();
  require(n >= 1, "bitstogram_round: no agents");
  SuccinctHistogram hist;

  if (options.noiseless) {
    require(ledger == nullptr, "bitstogram_round: noiseless mode must not charge a ledger");
    std::unordered_map<std::string, double> counts;
    for (const auto& v : agent_values) counts[v] += 1.0;
    for (auto& [v, c] : counts) hist.add_entry(v, c);
    hist.sort_entries();
    std::size_t ub = options.codec ? options.codec->bits() : 0;
    hist.set_meta(0.0, 0.0, 0.0, options.beta, options.seed, ub, true);
    return hist;
  }

  require(ledger != nullptr, "bitstogram_round: local randomizers require a ledger");
  require(options.epsilon > 0.0, "bitstogram_round: epsilon must be positive");
  require(options.codec != nullptr || options.candidates != nullptr,
          "bitstogram_round: universe descriptor missing (need codec or candidate list)");
  ledger->charge_all(options.round_id, {options.epsilon, 0.0});

  const double krr = rr_factor(options.epsilon);
  const double flip_p = 1.0 / (std::exp(options.epsilon) + 1.0);

  std::vector<std::uint64_t> vkeys(n);
  for (std::size_t j = 0; j < n; ++j) vkeys[j] = fnv1a(agent_values[j]);

  const std::uint64_t est_seed = mix2(options.seed, fnv1a(kTagEstChannel));

  if (options.candidates) {
    // Candidate-scan mode: every agent reports on the estimation channel.
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j) {
      double x = sign_of(mix2(mix2(est_seed, j), vkeys[j]));
      auto rng = make_rng(options.private_seed, "btg-rr", j);
      std::bernoulli_distribution flip(flip_p);
      z[j] = flip(rng) ? -x : x;
    }
    std::vector<std::uint64_t> premix(n);
    for (std::size_t j = 0; j < n; ++j) premix[j] = mix2(est_seed, j);
    for (const std::string& cand : *options.candidates) {
      std::uint64_t ck = fnv1a(cand);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += z[j] * sign_of(mix2(premix[j], ck));
      hist.add_entry(cand, krr * acc);
    }
    hist.sort_entries();
    double nn = static_cast<double>(std::max<std::size_t>(n, 2));
    double e = kFreqEstConst * krr *
               std::sqrt(nn * std::log(2.0 * std::max(nn, static_cast<double>(
                                                               options.candidates->size())) /
                                       options.beta));
    std::size_t ub = ceil_log2(std::max<std::size_t>(options.candidates->size(), 2));
    hist.set_meta(e, e, options.epsilon, options.beta, options.seed, ub, false);
    return hist;
  }

  // Heavy-hitter mode: per-bit agent-group decoding with an estimation channel
  // for frequency estimates and verification of decoded candidates.
  const ValueCodec& codec = *options.codec;
  const std::size_t kbits = codec.bits();
  const std::size_t m = options.buckets;
  require(kbits >= 1, "bitstogram_round: codec with zero bits");
  require(m >= 2, "bitstogram_round: need at least two buckets");

  const std::uint64_t bucket_seed = mix2(options.seed, fnv1a(kTagBucketHash));
  const std::uint64_t bit_seed = mix2(options.seed, fnv1a(kTagBitChannel));

  Channels ch = assign_channels(n, options.seed, kbits);

  std::vector<double> z(n);
  std::vector<std::uint32_t> bucket(n, 0);
  std::vector<std::uint8_t> enc;
  for (std::size_t j = 0; j < n; ++j) {
    auto rng = make_rng(options.private_seed, "btg-rr", j);
    std::bernoulli_distribution flip(flip_p);
    double x;
    if (ch.is_est[j]) {
      x = sign_of(mix2(mix2(est_seed, j), vkeys[j]));
    } else {
      if (!codec.encode(agent_values[j], enc)) enc.assign(kbits, 0);
      std::uint32_t c = static_cast<std::uint32_t>(mix2(bucket_seed, bits_key(enc)) % m);
      bucket[j] = c;
      std::uint8_t bit = enc[ch.group[j]];
      double s = sign_of(mix2(mix2(bit_seed, j), c));
      x = bit ? -s : s;
    }
    z[j] = flip(rng) ? -x : x;
  }

  // Group-wise bucket statistics D[g][c] ~ (#bit0 - #bit1)/krr of group-g
  // agents whose value hashes to c.
  std::vector<double> d_acc(kbits * m, 0.0);
  std::vector<std::size_t> group_size(kbits, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (ch.is_est[j]) continue;
    group_size[ch.group[j]]++;
    std::uint64_t h1 = mix2(bit_seed, j);
    double* row = &d_acc[static_cast<std::size_t>(ch.group[j]) * m];
    double zj = z[j];
    for (std::size_t c = 0; c < m; ++c) row[c] += zj * sign_of(mix2(h1, c));
  }

  // Analytic null model for the bucket-mass proxy sum_g |D[g][c]|.
  double null_mean = 0.0, null_var = 0.0;
  for (std::size_t g = 0; g < kbits; ++g) {
    double sg = std::sqrt(static_cast<double>(group_size[g]));
    null_mean += sg * std::sqrt(2.0 / M_PI);
    null_var += static_cast<double>(group_size[g]) * (1.0 - 2.0 / M_PI);
  }
  const double proxy_threshold = null_mean + 1.25 * std::sqrt(std::max(null_var, 1.0));

  // Estimation channel query support.
  std::vector<std::uint64_t> est_premix;
  std::vector<double> est_z;
  est_premix.reserve(ch.n_est);
  est_z.reserve(ch.n_est);
  for (std::size_t j = 0; j < n; ++j) {
    if (!ch.is_est[j]) continue;
    est_premix.push_back(mix2(est_seed, j));
    est_z.push_back(z[j]);
  }
  const double est_scale =
      krr * static_cast<double>(n) / std::max<double>(1.0, static_cast<double>(ch.n_est));
  auto estimate_value = [&](std::uint64_t vk) {
    double acc = 0.0;
    for (std::size_t i = 0; i < est_z.size(); ++i) acc += est_z[i] * sign_of(mix2(est_premix[i], vk));
    return est_scale * acc;
  };

  const std::size_t enum_bits =
      std::min<std::size_t>(options.enum_bits, std::min<std::size_t>(kbits, 24));
  std::vector<std::uint8_t> base_bits(kbits), cand_bits(kbits);
  std::vector<std::size_t> order(kbits);

  for (std::size_t c = 0; c < m; ++c) {
    double proxy = 0.0;
    for (std::size_t g = 0; g < kbits; ++g) proxy += std::abs(d_acc[g * m + c]);
    if (proxy < proxy_threshold) continue;

    for (std::size_t g = 0; g < kbits; ++g) base_bits[g] = d_acc[g * m + c] < 0.0 ? 1 : 0;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(d_acc[a * m + c]) < std::abs(d_acc[b * m + c]);
    });

    std::string best_value;
    double best_estimate = 0.0;
    bool found = false;
    std::size_t verified = 0;
    // Gray-code walk over flips of the least-confident bits: one bit toggle
    // and one rehash per candidate; only hash-consistent strings get decoded.
    std::vector<std::uint64_t> words;
    pack_bits(base_bits, words);
    std::uint64_t gray_state = 0;
    const std::uint64_t num_masks = 1ULL << enum_bits;
    for (std::uint64_t i = 0; i < num_masks && verified < 512; ++i) {
      if (i > 0) {
        std::size_t flip = static_cast<std::size_t>(__builtin_ctzll(i));
        std::size_t g = order[flip];
        words[g >> 6] ^= 1ULL << (g & 63);
        gray_state ^= 1ULL << flip;
      }
      if (mix2(bucket_seed, words_key(words.data(), words.size(), kbits)) % m != c) continue;
      cand_bits = base_bits;
      for (std::size_t b = 0; b < enum_bits; ++b) {
        if (gray_state & (1ULL << b)) cand_bits[order[b]] ^= 1;
      }
      auto value = codec.decode(cand_bits);
      if (!value) continue;
      ++verified;
      double est = estimate_value(fnv1a(*value));
      if (!found || est > best_estimate) {
        found = true;
        best_estimate = est;
        best_value = *value;
      }
    }
    if (found) hist.add_entry(std::move(best_value), best_estimate);
  }

  hist.sort_entries();
  double e_bound = bitstogram_error_bound(n, options.epsilon, options.beta, kbits, m);
  double m_bound = bitstogram_omission_bound(n, kbits, options.epsilon, options.beta, m);
  hist.set_meta(e_bound, std::max(m_bound, e_bound), options.epsilon, options.beta, options.seed,
                kbits, false);
  return hist;
}

// ---------------------------------------------------------------------------
// HeavySumsOracle
// ---------------------------------------------------------------------------

SumOracle heavy_sums_round(const std::vector<std::string>& agent_values,
                           const std::vector<Point>& g_values, double g_diameter,
                           double g_sensitivity, AgentLedgerSet* ledger,
                           const SumOracleOptions& options) {
  const std::size_t n = agent_values.size();
  require(n >= 1, "heavy_sums_round: no agents");
  require(g_values.size() == n, "heavy_sums_round: g values size mismatch");
  require(std::isfinite(g_diameter) && g_diameter > 0.0,
          "heavy_sums_round: unbounded g rejected (diameter required)");
  require(g_sensitivity > 0.0, "heavy_sums_round: sensitivity required");
  const std::size_t dim = g_values.front().size();
  for (const auto& g : g_values) {
    require(g.size() == dim, "heavy_sums_round: g dimension mismatch");
  }

  SumOracle oracle;
  oracle.dim_ = dim;
  oracle.diameter_ = g_diameter;
  oracle.sensitivity_ = g_sensitivity;
  oracle.seed_ = options.seed;
  oracle.epsilon_ = options.epsilon;
  oracle.delta_ = options.delta;
  oracle.value_keys_.resize(n);
  for (std::size_t j = 0; j < n; ++j) oracle.value_keys_[j] = fnv1a(agent_values[j]);

  if (options.noiseless) {
    require(ledger == nullptr, "heavy_sums_round: noiseless mode must not charge a ledger");
    oracle.noiseless_ = true;
    oracle.sigma_ = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      auto [it, inserted] = oracle.exact_.try_emplace(agent_values[j], Point(dim, 0.0));
      add_inplace(it->second, g_values[j]);
    }
    return oracle;
  }

  require(ledger != nullptr, "heavy_sums_round: local randomizers require a ledger");
  // Response sensitivity is 2 * g sensitivity (a data swap may also flip the sign).
  GaussianNoiseSpec spec = gaussian_spec(options.epsilon, options.delta, 2.0 * g_sensitivity);
  oracle.sigma_ = spec.sigma;
  ledger->charge_all(options.round_id, {options.epsilon, options.delta});

  oracle.reports_.resize(n * dim);
  for (std::size_t j = 0; j < n; ++j) {
    double s = prf_sign(options.seed, oracle.value_keys_[j], j);
    auto rng = make_rng(options.private_seed, "hso-noise", j);
    std::normal_distribution<double> noise(0.0, spec.sigma);
    double* row = &oracle.reports_[j * dim];
    for (std::size_t cidx = 0; cidx < dim; ++cidx) {
      row[cidx] = s * g_values[j][cidx] + noise(rng);
    }
  }
  return oracle;
}

Point SumOracle::query(const std::string& v) const {
  if (noiseless_) {
    auto it = exact_.find(v);
    return it == exact_.end() ? Point(dim_, 0.0) : it->second;
  }
  Point out(dim_, 0.0);
  std::uint64_t vk = fnv1a(v);
  const std::size_t n = value_keys_.size();
  for (std::size_t j = 0; j < n; ++j) {
    double s = prf_sign(seed_, vk, j);
    const double* row = &reports_[j * dim_];
    for (std::size_t c = 0; c < dim_; ++c) out[c] += s * row[c];
  }
  return out;
}

double SumOracle::error_bound(double beta) const {
  if (noiseless_) return 0.0;
  return hso_error_bound(value_keys_.size(), dim_, epsilon_, delta_, beta, diameter_, sensitivity_);
}

Point sum_query(const SumOracle& oracle, const std::string& v) { return oracle.query(v); }

double hso_error_bound(std::size_t n, std::size_t dim, double epsilon, double delta, double beta,
                       double diameter, double sensitivity) {
  double nn = static_cast<double>(n);
  double dd = static_cast<double>(dim);
  double term1 = 2.0 * diameter * std::sqrt(2.0 * nn * std::log((dd + 1.0) / beta));
  double cg = std::sqrt(2.0 * std::log(1.25 / delta));
  double term2 =
      (4.0 * cg * sensitivity / epsilon) * std::sqrt(2.0 * dd * nn * std::log(4.0 / beta));
  return term1 + term2;
}

std::optional<Point> noisy_average(const SuccinctHistogram& h, const SumOracle& o,
                                   const std::string& v) {
  double count = h.query(v);
  if (count <= 0.0) return std::nullopt;
  Point sum = o.query(v);
  for (double& x : sum) x /= count;
  return sum;
}

}  // namespace ldpkm
