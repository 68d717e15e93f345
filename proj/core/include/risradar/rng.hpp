#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace risradar {

/// Deterministic, seedable PRNG (xoshiro256**) with explicit substream
/// derivation. Self-contained so that results are reproducible across
/// compilers and standard-library versions; never global.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal via Box-Muller (cached pair).
  double gaussian();
  /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_gaussian(double variance);

  /// Independent child stream; `tag` separates streams with the same parent.
  Rng derive(std::uint64_t tag) const;
  Rng derive(std::string_view tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace risradar
