#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldpkm {

// ---------------------------------------------------------------------------
// Seeded pseudo-randomness. Two flavors live side by side:
//  * rng streams (std::mt19937_64) for sampled randomness (noise, restarts),
//  * a keyed mixing function used as the public sign/hash source that both
//    agents and the aggregator must be able to re-derive from a shared seed.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix2(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (splitmix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t mix3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix2(mix2(a, b), c);
}

// +1/-1 sign derived from a keyed PRF; reproducible from the public seed.
inline double prf_sign(std::uint64_t seed, std::uint64_t key, std::uint64_t idx) {
  return (mix3(seed, key, idx) & 1ULL) ? 1.0 : -1.0;
}

// 64-bit FNV-1a over a byte string; canonical fingerprint of a value key.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// Derives an independent engine for a named purpose from a master seed.
inline std::mt19937_64 make_rng(std::uint64_t master, const std::string& tag, std::uint64_t index = 0) {
  return std::mt19937_64(mix3(master, fnv1a(tag), index));
}

// ---------------------------------------------------------------------------
// Compensated summation. Oracle comparisons at n >= 1e5 need the extra bits.
// ---------------------------------------------------------------------------
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline int ceil_log2(std::uint64_t v) {
  int b = 0;
  std::uint64_t p = 1;
  while (p < v) {
    p <<= 1;
    ++b;
  }
  return b;
}

}  // namespace ldpkm
