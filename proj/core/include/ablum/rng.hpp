#pragma once

#include <cstdint>
#include <random>

namespace ablum {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent random streams per model component. A run seed feeds every
// stream, so changing e.g. the network size leaves the initial land-use draw
// untouched.
enum class Stream : std::uint64_t {
  kCapitals = 1,
  kLandUse = 2,
  kProfiles = 3,
  kNetwork = 4,
  kDynamics = 5,
  kDesign = 6,
  kBootstrap = 7,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  const std::uint64_t mixed =
      splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(stream) << 32));
  std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
  return Rng(seq);
}

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ablum
