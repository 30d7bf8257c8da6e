#pragma once

#include <cstdint>

namespace renyi {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform draw in [0, 1) that depends only on (seed, counter).
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t bits = mix64(mix64(seed) ^ mix64(counter + 0x632BE59BD9B4E019ULL));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace renyi
