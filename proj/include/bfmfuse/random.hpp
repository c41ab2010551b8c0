#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace bfmfuse {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Derives an independent engine for a named phase ("synth", "init",
/// "mutation", ...) from one user seed. `index` splits a phase further,
/// e.g. one stream per generation.
inline Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
  std::uint64_t state = seed ^ detail::fnv1a(name);
  state += 0x632be59bd9b4e019ULL * (index + 1);
  std::seed_seq seq{static_cast<std::uint32_t>(detail::splitmix64(state)),
                    static_cast<std::uint32_t>(detail::splitmix64(state)),
                    static_cast<std::uint32_t>(detail::splitmix64(state)),
                    static_cast<std::uint32_t>(detail::splitmix64(state))};
  return Rng(seq);
}

/// Uniform double in [0, 1). Spelled out instead of using
/// std::uniform_real_distribution so streams are identical across standard
/// libraries.
inline double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_between(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // rejection sampling on the top of the range keeps it unbiased
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

inline bool bernoulli(Rng& rng, double p) { return unit_uniform(rng) < p; }

/// Standard normal via Box-Muller.
inline double standard_normal(Rng& rng) {
  double u1;
  do {
    u1 = unit_uniform(rng);
  } while (u1 <= 0.0);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace bfmfuse
