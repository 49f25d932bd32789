#pragma once

#include <cstdint>
#include <random>

namespace agebandit {

using Rng = std::mt19937_64;

// Domains for substream derivation. Each (root seed, domain, a, b) tuple maps
// to an independent generator, so draws in one domain never shift another.
enum class StreamDomain : std::uint64_t {
  kRequest = 1,         // (j, p)
  kUpdateDecision = 2,  // (k, p)
  kPolicy = 3,          // (j, p)
  kTest = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_substream(std::uint64_t root_seed, StreamDomain domain, std::uint64_t a,
                          std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(root_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(domain));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b * 0x2545f4914f6cdd1dULL));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

/// Uniform double in [0, 1) from the top 53 bits; bit-identical across platforms.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Unbiased integer in [0, n) by rejection; avoids libstdc++-specific
// distribution algorithms so sequences stay portable.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace agebandit
