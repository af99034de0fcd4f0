#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace capvol {

/// Deterministic, platform-independent pseudo-random stream (SplitMix64 with
/// an explicit Box-Muller normal).  std::normal_distribution is avoided on
/// purpose: its variate sequence is implementation-defined, and reports must
/// reproduce bit-exactly for a given seed everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  /// Independent stream for (seed, index); used to partition Monte-Carlo
  /// sample streams by sample index so any parallel split is bit-exact.
  Rng(uint64_t seed, uint64_t index)
      : state_(mix(seed + 0x9E3779B97F4A7C15ull * (index + 1))) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in (0, 1]; never returns 0 (safe to take log of).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * (uniform() - 0x1.0p-53); }

  /// Standard normal via Box-Muller (caches the spare variate).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace capvol
