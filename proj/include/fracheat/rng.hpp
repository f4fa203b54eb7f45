#pragma once

#include <cstdint>

namespace fracheat {

// Minimal deterministic generator (splitmix64); identical streams on every
// platform, used for seeded test ensembles.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [-1,1).
  double sym() { return 2.0 * unit() - 1.0; }
};

}  // namespace fracheat
