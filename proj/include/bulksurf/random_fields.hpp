#pragma once

// Reproducible random data for the randomized suites. Each trial draws from
// its own stream derived from (seed, trial), so results do not depend on the
// order in which trials run.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bulksurf/disk_poisson.hpp"

namespace bulksurf {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ULL)));
}

/// Values in [lo, hi]: half pointwise noise, half a random low-frequency
/// angular profile with a random radial tilt.
inline PolarField random_polar_field(const DiskGrid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 3);
  const int n = mode(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double tilt = unit(rng);
  return g.sample([&](double r, double th) {
    const double profile = 0.5 * (1.0 + std::cos(n * th - phase)) * ((1.0 - tilt) + tilt * r);
    return lo + (hi - lo) * (0.5 * unit(rng) + 0.5 * profile);
  });
}

inline CircleField random_circle_field(const DiskGrid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 3);
  const int n = mode(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  return g.sample_boundary([&](double th) {
    const double profile = 0.5 * (1.0 + std::cos(n * th - phase));
    return lo + (hi - lo) * (0.5 * unit(rng) + 0.5 * profile);
  });
}

}  // namespace bulksurf
