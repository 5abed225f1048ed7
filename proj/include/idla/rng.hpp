// rng.hpp: seeded random streams.
//
// Every stochastic component draws from std::mt19937_64 engines whose 64-bit
// seeds are derived from a master seed and a stream index with the SplitMix64
// finalizer. child(master, i) is a pure function, so particle i of a run, or
// trial i of an experiment, sees the same stream no matter which thread
// executes it or which process variant consumes it.
#pragma once

#include <cstdint>
#include <random>

namespace idla::rng {

using Engine = std::mt19937_64;

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`.
constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

inline Engine child(std::uint64_t master, std::uint64_t index) { return Engine{derive(master, index)}; }

// Reserved stream indices. Particle streams use their particle index, which is
// always far below these.
inline constexpr std::uint64_t kSchedulerStream = 0xffff'ffff'0000'0001ULL;
inline constexpr std::uint64_t kClockStream = 0xffff'ffff'0000'0002ULL;

/// Uniform integer in [0, bound).
inline std::uint64_t below(Engine& eng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(eng);
}

/// Fair coin from the top bit of one draw.
inline bool coin(Engine& eng) { return (eng() >> 63) != 0; }

inline double exponential(Engine& eng, double rate = 1.0) {
  return std::exponential_distribution<double>(rate)(eng);
}

}  // namespace idla::rng
