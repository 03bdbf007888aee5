#pragma once

#include <cstdint>

namespace selfsim {

// splitmix64 (Steele/Lea/Flood).  Fixed here so that seeded fixtures stay
// portable across platforms and standard-library versions.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }
};

}  // namespace selfsim
