#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace seadsc::detail {

/// Uniform double strictly inside (0, 1). A 52-bit draw plus a half-ulp
/// offset keeps both endpoints unreachable and stays exactly representable,
/// so identical seeds give bit-identical streams on every platform.
inline double uniform_open01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform index in [0, n) without modulo bias (fixed-point multiply).
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(rng()) * static_cast<unsigned __int128>(n)) >> 64);
}

}  // namespace seadsc::detail
