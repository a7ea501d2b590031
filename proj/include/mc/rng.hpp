#pragma once

#include <cstdint>

namespace mc {

/// Identifies one reproducible random stream. The same (seed, stream) pair
/// yields the same sample sequence on every platform.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Derives a child stream id; used by the harness to give every trial an
/// independent stream from (base_seed, trial_index).
std::uint64_t derive_stream(std::uint64_t base_seed, std::uint64_t index);

/// SplitMix64 run in counter mode: output i is the SplitMix64 finalizer
/// applied to key + i*gamma, with the key scrambled from (seed, stream).
/// Counter-based, so the sequence is a pure function of (seed, stream, i)
/// and identical across platforms and compilers.
class CounterRng {
public:
  explicit CounterRng(RngSeed s);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double next_uniform();

  /// Uniform in (0, 1), never exactly 0 or 1; for inverse-CDF sampling.
  double next_uniform_open();

  /// Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n);

  /// Standard normal via the inverse CDF (Acklam's rational approximation
  /// plus one Halley refinement step). Chosen over Box-Muller so each draw
  /// consumes exactly one uniform.
  double next_gaussian();

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Inverse of the standard normal CDF; defined for p in (0, 1).
double inverse_normal_cdf(double p);

}  // namespace mc
