#pragma once

#include <cstdint>
#include <random>

namespace drugsim {

// All randomness in a run flows from mt19937_64 engines seeded through
// split_mix(seed ^ stream_tag). The engine algorithm and the uint64 -> [0,1)
// mapping below are fully specified, so identical inputs reproduce identical
// runs on any conforming standard library.
using RandomEngine = std::mt19937_64;

inline constexpr std::uint64_t split_mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream tags keep the deployment, traffic, and jitter draws independent of
// one another for the same run seed.
enum class RngStream : std::uint64_t {
  Deployment = 0x6465706C6F79ULL,
  Traffic = 0x7472616666ULL,
  Jitter = 0x6A697474ULL,
};

inline RandomEngine make_engine(std::uint64_t seed, RngStream stream) {
  return RandomEngine(split_mix(seed ^ static_cast<std::uint64_t>(stream)));
}

// Top 53 bits of the draw, scaled to [0, 1). Used instead of
// std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform01(RandomEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection, bit-reproducible everywhere.
inline std::uint64_t uniform_index(RandomEngine& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t draw = rng();
  while (draw >= limit) {
    draw = rng();
  }
  return draw % n;
}

}  // namespace drugsim
