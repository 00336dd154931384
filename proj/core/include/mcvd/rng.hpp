#pragma once

#include <cstdint>
#include <random>

namespace mcvd {

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic random stream. mt19937_64 is fully specified by the
/// standard and the distributions below are hand-rolled, so a given seed
/// produces the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed ^ 0x9e3779b97f4a7c15ull)) {}

  /// Independent substream for parallel blocks.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed + 0x632be59bd9b4e019ull * (index + 1)));
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Gaussian via Box-Muller (no spare caching).
  double gaussian(double mean, double sigma);

  /// Binomial(n, p) by inversion from the mode.
  long binomial(long n, double p);

 private:
  std::mt19937_64 gen_;
};

}  // namespace mcvd
