#pragma once

#include <cstdint>

namespace qtoken {

/// Splittable xoshiro256** generator. All stochastic operations in the
/// library take an explicit Rng handle; per-trial streams are derived from
/// (master_seed, stream_index) so runs replay deterministically regardless
/// of thread count. Distributions are hand-rolled on top of next_u64() to
/// keep the byte stream independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream derived from a master seed; derive(s, i) and derive(s, j) are
  /// statistically independent for i != j.
  static Rng derive(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n); n >= 1.
  std::uint64_t uniform_int(std::uint64_t n);

  bool bernoulli(double p);

  /// Standard normal via Box-Muller (no cached spare).
  double normal();
  double normal(double mean, double stddev);

  /// Poisson by inversion; mean up to ~700 (exp underflow guarded by
  /// chunking). Readout models use means of order 10-100.
  int poisson(double mean);

  /// Sum of n Bernoulli(p) draws.
  int binomial(int n, double p);

 private:
  std::uint64_t state_[4];
};

/// 64-bit mixing of two words (seed derivation, per-trial breadcrumbs).
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

}  // namespace qtoken
