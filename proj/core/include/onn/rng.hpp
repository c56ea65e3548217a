#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace onn {

// std::uniform_*_distribution output is implementation-defined, so the
// reproducibility contract draws bits from mt19937_64 directly.

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double rand_unit(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n); n must be positive.
inline std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  // rejection sampling keeps the draw unbiased and platform-stable
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % n;
}

/// Deterministic Fisher-Yates shuffle.
template <typename T>
void shuffle_indices(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i)
    std::swap(values[i - 1], values[rand_below(rng, i)]);
}

}  // namespace onn
