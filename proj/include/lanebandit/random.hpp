#pragma once

#include <cstdint>
#include <random>

namespace lanebandit {

// The engine output is fully specified by the standard; the distribution
// helpers below replace std::*_distribution, whose algorithms are
// implementation-defined, so seeded runs are identical across toolchains.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

/// Uniform integer in [0, n), unbiased by rejection. n must be positive.
inline std::uint64_t uniform_index(Rng& gen, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - Rng::max() % n;
  std::uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % n;
}

/// Independent stream derived from a base seed and a purpose tag.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace lanebandit
