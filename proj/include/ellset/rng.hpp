#pragma once

#include <cstdint>

namespace ellset {

/// Counter-based pseudo-random stream (SplitMix64). Chosen over the
/// <random> engines because its output is bit-identical on every
/// platform, which the deterministic-report contract requires.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

/// Independent substream for logical work unit `index` of a run seeded
/// with `seed`. Streams depend only on (seed, index), never on how the
/// indices are distributed over threads, so reported results are
/// independent of the worker count.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  Rng mixer(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return Rng(mixer.next_u64());
}

/// Derived seed for a nested sampling stage (row a, item b of a run).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  Rng mixer(seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xC2B2AE3D27D4EB4FULL * (b + 1));
  return mixer.next_u64();
}

}  // namespace ellset
