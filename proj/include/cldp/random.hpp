#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cldp {

// SplitMix64 step; used only to expand seeds into full generator states.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-seeded xoshiro256++ stream.
///
/// Stream `k` of master seed `s` is seeded from SplitMix64 run on
/// `s + (k+1) * 0x9E3779B97F4A7C15`. Replication loops hand one stream per
/// replication index, so results are independent of execution order and
/// thread count. All samplers below are derived from the raw 64-bit output
/// here, not from std::<random> distributions, so a (seed, stream) pair
/// yields the same draws on every conforming platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t x = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    for (auto& w : s_) w = splitmix64_next(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 0x1ULL;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0,1); 53-bit resolution, never 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  /// Standard normal (Box-Muller, cosine branch).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi() * u2);
  }

  /// Poisson(mean) by counting unit-exponential arrivals in [0, mean].
  /// Exact for every mean (no e^{-mean} underflow), O(mean) draws.
  long poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
      throw std::domain_error("poisson: mean must be finite and >= 0");
    long n = 0;
    double acc = 0.0;
    for (;;) {
      acc += -std::log(uniform());
      if (acc > mean) return n;
      ++n;
    }
  }

  static constexpr double two_pi() { return 6.283185307179586476925286766559; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// Stream-index bases; keeps replication streams disjoint from auxiliary
// draws (pilot clusters for margin calibration) and from other scales of a
// multi-scale experiment. Documented in the README.
constexpr std::uint64_t kStreamPerScale = 1ULL << 40;
constexpr std::uint64_t kPilotStreamBase = 1ULL << 62;

}  // namespace cldp
