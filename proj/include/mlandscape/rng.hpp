#pragma once

#include <cstdint>
#include <random>

namespace mlandscape {

/**
 * Portable seeded normal generator.
 *
 * Engine: std::mt19937_64, whose output sequence is fixed by the C++
 * standard. Substream k of a seed s is seeded with splitmix64(s + k * 0x9E3779B97F4A7C15).
 * The band ensemble uses substream 0 for the diagonal and substream d for
 * superdiagonal d (1 <= d <= W), each drawn in increasing row order.
 *
 * Uniforms take the top 53 bits of a 64-bit draw, u = (x >> 11 + 0.5) * 2^-53,
 * which lies strictly inside (0, 1). Normals come from the Box-Muller
 * transform: each pair (u1, u2) yields sqrt(-2 ln u1) cos(2 pi u2) and then
 * sqrt(-2 ln u1) sin(2 pi u2), in that order.
 */
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mlandscape
