#pragma once

#include <cstdint>
#include <numbers>

#include "llab/grid.hpp"

namespace llab {

namespace rng {

/// splitmix64 finalizer; the workhorse of the counter-based generator.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return mix(mix(mix(seed) ^ stream) ^ counter);
}

/// Uniform in (0,1): top 53 bits, offset so 0 is never returned.
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// One standard normal per counter via Box-Muller (cosine branch).
inline double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t k1 = key(seed, stream, 2 * counter);
  const std::uint64_t k2 = key(seed, stream, 2 * counter + 1);
  const double u1 = uniform01(k1);
  const double u2 = uniform01(k2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Derives a sub-seed for an independent sampling domain (e.g. the magnetic
/// field noise, solver starts) from a user seed and a domain tag.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t domain_tag) {
  return mix(seed ^ mix(domain_tag));
}

}  // namespace rng

/// A realization of lattice white noise: i.i.d. N(0, 1/delta^2) site values,
/// a pure function of (seed, stream_id, grid).
struct NoiseRealization {
  Grid grid;
  ScalarField xi;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

inline NoiseRealization sample_white_noise(const Grid& g, std::uint64_t seed,
                                           std::uint64_t stream_id) {
  NoiseRealization out{g, ScalarField(g), seed, stream_id};
  const double sd = 1.0 / g.delta();
  auto v = out.xi.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = sd * rng::standard_normal(seed, stream_id, i);
  return out;
}

}  // namespace llab
