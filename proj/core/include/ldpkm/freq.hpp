#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldpkm/geometry.hpp"
#include "ldpkm/privacy.hpp"

namespace ldpkm {

// ---------------------------------------------------------------------------
// Value codecs: invertible value <-> bit-string encodings. The heavy-hitter
// decoder reconstructs values bit-group by bit-group, so it needs to map
// recovered bit strings back to canonical value keys (and reject garbage).
// ---------------------------------------------------------------------------
class ValueCodec {
 public:
  virtual ~ValueCodec() = default;
  virtual std::size_t bits() const = 0;
  virtual bool encode(const std::string& value, std::vector<std::uint8_t>& bits_out) const = 0;
  virtual std::optional<std::string> decode(const std::vector<std::uint8_t>& bits) const = 0;
};

// Fixed-width nonnegative integer tuples "prefix:v1,v2,...,vd" (cells).
class TupleCodec : public ValueCodec {
 public:
  TupleCodec(std::string prefix, std::size_t arity, std::int64_t min_value,
             std::int64_t max_value, char sep = ',');
  std::size_t bits() const override;
  bool encode(const std::string& value, std::vector<std::uint8_t>& bits_out) const override;
  std::optional<std::string> decode(const std::vector<std::uint8_t>& bits) const override;

 private:
  std::string prefix_;
  std::size_t arity_;
  std::int64_t min_;
  std::int64_t max_;
  char sep_;
  std::size_t bits_per_entry_;
};

// Raw 64-bit integers rendered in decimal (planted heavy-hitter tests).
class U64Codec : public ValueCodec {
 public:
  explicit U64Codec(std::size_t bits) : bits_(bits) {}
  std::size_t bits() const override { return bits_; }
  bool encode(const std::string& value, std::vector<std::uint8_t>& bits_out) const override;
  std::optional<std::string> decode(const std::vector<std::uint8_t>& bits) const override;

 private:
  std::size_t bits_;
};

// ---------------------------------------------------------------------------
// Succinct histogram: (value, estimate) entries plus the declared error bound
// E and omission threshold M.
// ---------------------------------------------------------------------------
struct HistogramEntry {
  std::string value;
  double estimate = 0.0;  // raw, may be negative; query() clamps
};

class SuccinctHistogram {
 public:
  double query(const std::string& v) const;      // stored estimate else 0; clamped >= 0
  double raw_query(const std::string& v) const;  // unclamped; 0 if absent
  bool contains(const std::string& v) const;

  const std::vector<HistogramEntry>& entries() const { return entries_; }
  double error_bound() const { return error_; }        // E
  double omission_bound() const { return omission_; }  // M
  double epsilon_used() const { return epsilon_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t universe_bits() const { return universe_bits_; }
  bool noiseless() const { return noiseless_; }

  void set_meta(double e, double m, double eps, double beta, std::uint64_t seed,
                std::size_t universe_bits, bool noiseless);
  void add_entry(std::string value, double estimate);
  void sort_entries();

 private:
  std::vector<HistogramEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  double error_ = 0.0;
  double omission_ = 0.0;
  double epsilon_ = 0.0;
  double beta_ = 0.0;
  std::uint64_t seed_ = 0;
  std::size_t universe_bits_ = 0;
  bool noiseless_ = false;
};

// Constants frozen by the calibration harness (`ldpkm calibrate` reproduces
// the measurement; tests use these values).
constexpr double kFreqEstConst = 1.35;       // multiplier inside E
constexpr double kFreqOmitConst = 0.38;      // multiplier inside M
constexpr double kEstimationFraction = 0.4;  // share of agents on the estimation channel

struct BitstogramOptions {
  double epsilon = 1.0;
  double beta = 0.05;
  std::uint64_t seed = 1;          // public randomness
  std::uint64_t private_seed = 2;  // agents' private coins
  int round_id = 1;
  std::size_t buckets = 4096;  // m, heavy-hitter mode
  std::size_t enum_bits = 15;  // uncertain-bit enumeration budget
  bool noiseless = false;
  // Exactly one of these picks the mode (unless noiseless):
  const ValueCodec* codec = nullptr;                     // heavy-hitter identification
  const std::vector<std::string>* candidates = nullptr;  // analyzer-supplied candidate scan
};

// One-round locally private succinct histogram over per-agent value keys.
// Each agent sends a single epsilon-randomized-response bit against a keyed
// public sign source; the analyzer decodes heavy values (or scans the given
// candidates) and estimates their frequencies on a disjoint agent subset.
SuccinctHistogram bitstogram_round(const std::vector<std::string>& agent_values,
                                   AgentLedgerSet* ledger, const BitstogramOptions& options);

double histogram_query(const SuccinctHistogram& h, const std::string& v);

// Declared bounds as functions of the parameters (heavy-hitter mode).
double bitstogram_error_bound(std::size_t n, double epsilon, double beta,
                              std::size_t universe_bits, std::size_t buckets);
double bitstogram_omission_bound(std::size_t n, std::size_t universe_bits, double epsilon,
                                 double beta, std::size_t buckets);

// ---------------------------------------------------------------------------
// HeavySumsOracle: per-agent signed vector reports; query returns an unbiased
// estimate of the sum of g over agents mapping to the queried value.
// ---------------------------------------------------------------------------
struct SumOracleOptions {
  double epsilon = 1.0;
  double delta = 1e-6;
  double beta = 0.05;
  std::uint64_t seed = 1;
  std::uint64_t private_seed = 2;
  int round_id = 1;
  bool noiseless = false;
};

class SumOracle {
 public:
  Point query(const std::string& v) const;

  std::size_t dim() const { return dim_; }
  std::size_t num_agents() const { return value_keys_.size(); }
  double sigma() const { return sigma_; }
  double diameter() const { return diameter_; }
  double sensitivity() const { return sensitivity_; }
  std::uint64_t seed() const { return seed_; }
  bool noiseless() const { return noiseless_; }
  // Error bound from the oracle's parameters at failure probability beta.
  double error_bound(double beta) const;
  const std::vector<double>& reports() const { return reports_; }

  friend SumOracle heavy_sums_round(const std::vector<std::string>&, const std::vector<Point>&,
                                    double, double, AgentLedgerSet*, const SumOracleOptions&);

 private:
  std::size_t dim_ = 0;
  double sigma_ = 0.0;
  double diameter_ = 0.0;
  double sensitivity_ = 0.0;
  double epsilon_ = 0.0;
  double delta_ = 0.0;
  std::uint64_t seed_ = 0;
  bool noiseless_ = false;
  std::vector<double> reports_;             // n x dim, row-major
  std::vector<std::uint64_t> value_keys_;   // fingerprint per agent
  std::unordered_map<std::string, Point> exact_;  // noiseless mode only
};

// g_values[j] = g(x_j) for agent j; all the aggregator sees is the randomized
// report. g must map into a ball of the given diameter and have the given
// l2 sensitivity (the response sensitivity is twice that, sign included).
SumOracle heavy_sums_round(const std::vector<std::string>& agent_values,
                           const std::vector<Point>& g_values, double g_diameter,
                           double g_sensitivity, AgentLedgerSet* ledger,
                           const SumOracleOptions& options);

Point sum_query(const SumOracle& oracle, const std::string& v);

double hso_error_bound(std::size_t n, std::size_t dim, double epsilon, double delta, double beta,
                       double diameter, double sensitivity);

// sum/count combinator; nullopt when the count estimate is not positive.
std::optional<Point> noisy_average(const SuccinctHistogram& h, const SumOracle& o,
                                   const std::string& v);

}  // namespace ldpkm
