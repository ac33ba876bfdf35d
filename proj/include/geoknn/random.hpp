#pragma once

#include <cstdint>
#include <random>

namespace geoknn {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream number `index` under `root_seed`. Streams depend only
/// on (root_seed, index), never on the order in which they are created.
inline Rng substream(std::uint64_t root_seed, std::uint64_t index) {
  return Rng(mix64(mix64(root_seed) ^ mix64(index + 0x632BE59BD9B4E019ULL)));
}

/// Uniform on [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

/// Circular von Mises draw with mean angle mu and concentration kappa, by the
/// Best-Fisher (1979) wrapped-Cauchy rejection scheme. Result in (-pi, pi]
/// around mu (not reduced mod 2 pi).
double von_mises_angle(Rng& rng, double mu, double kappa);

}  // namespace geoknn
