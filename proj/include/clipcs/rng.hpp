#pragma once

#include <cstdint>
#include <random>

#include "clipcs/types.hpp"

namespace clipcs {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream for one trial. Depends only on (master_seed, trial_index).
inline Rng trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
  return Rng(splitmix64(splitmix64(master_seed) ^ splitmix64(trial_index + 0x5851f42d4c957f2dULL)));
}

/// Circular complex Gaussian with E|z|^2 = variance.
inline cplx complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace clipcs
