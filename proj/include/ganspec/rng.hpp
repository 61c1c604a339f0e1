#pragma once

#include <cstdint>

namespace ganspec {

/// SplitMix64 generator. Each draw adds 0x9E3779B97F4A7C15 to the state and
/// mixes it with the multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB
/// (shifts 30, 27, 31). The integer stream is identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

  /// Independent generator for a numbered sub-stream; does not advance *this.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace ganspec
