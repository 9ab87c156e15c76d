#pragma once

#include <cstdint>
#include <random>

#include "bilevel/vector.hpp"

namespace bilevel {

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fully pinned by the standard, and every transform below is written out
// explicitly instead of going through std::*_distribution (whose outputs are
// implementation-defined). Identical seed, identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0, 1); never returns 0 so logs are safe.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform on {0, ..., n-1} by rejection (no modulo bias).
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw ContractViolation("uniform_int: n must be positive");
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller (cosine branch; one draw per two uniforms).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

// Uniform direction on the unit sphere in R^d (Gaussian vector, normalized).
DenseVector sample_unit_sphere(Rng& rng, int d);

// Uniform point in the closed ball of given radius (direction times
// radius * U^{1/d}).
DenseVector sample_ball(Rng& rng, int d, double radius);

}  // namespace bilevel
