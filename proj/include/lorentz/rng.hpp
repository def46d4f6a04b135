#pragma once

#include <cstdint>
#include <random>

namespace lorentz {

using Rng = std::mt19937_64;

/// Independent random streams: a trajectory's seed is a stateless function of
/// (master seed, stream, index), so results never depend on scheduling.
enum class Stream : std::uint64_t {
  trajectory = 0,
  return_probability = 1,
  green_kubo = 2,
  monte_carlo = 3,
};

/// splitmix64 finalizer applied to each input word in turn.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  h = mix(h ^ static_cast<std::uint64_t>(stream));
  return mix(h ^ index);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace lorentz
