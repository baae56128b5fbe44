#pragma once

#include <cmath>
#include <cstdint>

namespace spde::rng {

// SplitMix64 finalizer. Bijective on 64-bit words with full avalanche,
// which is what makes the counter-based addressing below collision-safe.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in (0,1]; never returns 0 so it is safe under log().
inline double to_unit(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// Key for one scalar draw addressed by (seed, path, mode, step). Purely
// functional: the same coordinates give the same key on every thread and in
// every call order.
inline std::uint64_t counter_key(std::uint64_t seed, std::uint64_t path,
                                 std::uint64_t mode, std::uint64_t step) {
  std::uint64_t h = mix64(seed ^ 0x8BADF00D5DEECE66ULL);
  h = mix64(h ^ (0x9E3779B97F4A7C15ULL * (path + 1)));
  h = mix64(h ^ (0xC2B2AE3D27D4EB4FULL * (mode + 1)));
  h = mix64(h ^ (0x165667B19E3779F9ULL * (step + 1)));
  return h;
}

// Standard normal via Box-Muller on two counter-derived uniforms.
inline double standard_normal(std::uint64_t key) {
  const double u1 = to_unit(mix64(key ^ 0xD6E8FEB86659FD93ULL));
  const double u2 = to_unit(mix64(key ^ 0xCA5A826395121157ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

inline double normal_at(std::uint64_t seed, std::uint64_t path,
                        std::uint64_t mode, std::uint64_t step) {
  return standard_normal(counter_key(seed, path, mode, step));
}

// Auxiliary uniform stream for test-field generation and diagnostics.
inline double uniform_at(std::uint64_t seed, std::uint64_t path,
                         std::uint64_t mode, std::uint64_t step) {
  return to_unit(mix64(counter_key(seed, path, mode, step) ^ 0xA0761D6478BD642FULL));
}

}  // namespace spde::rng
