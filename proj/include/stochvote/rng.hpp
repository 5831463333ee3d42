#pragma once

// Random streams for the simulator.
//
// Replication r of a run with seed S draws from SplitMix64 started at
// state replication_seed(S, r). Normal variates come from the Marsaglia
// polar method on 53-bit uniforms. Both are fixed so that simulation output
// is reproducible bit for bit on a given build.

#include <cmath>
#include <cstdint>
#include <limits>

namespace stochvote {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed-splitting rule: stream r is seeded by mix(seed + (r + 1) * golden).
inline constexpr std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication) {
  return splitmix64_mix(seed + (replication + 1) * kGoldenGamma);
}

// SplitMix64; satisfies UniformRandomBitGenerator. Seeding is O(1), which
// matters with millions of short replications.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += kGoldenGamma;
    return splitmix64_mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// N(0, 1) by the polar method; the spare variate of each pair is cached.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double standard() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * engine_.uniform() - 1.0;
      v = 2.0 * engine_.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  double operator()(double mu, double sigma) { return mu + sigma * standard(); }

 private:
  SplitMix64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stochvote
