#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cdmacap {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the work unit addressed by `path` under `seed`. Depends only on
/// the tuple, so a unit gets the same stream whichever worker runs it.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(seed, path));
}

// Stream tags keep independent uses of the same (seed, index) apart.
namespace stream {
inline constexpr std::uint64_t kPlacement = 1;
inline constexpr std::uint64_t kFading = 2;
inline constexpr std::uint64_t kStats = 3;
inline constexpr std::uint64_t kResample = 4;
inline constexpr std::uint64_t kSelection = 5;
}  // namespace stream

}  // namespace cdmacap
