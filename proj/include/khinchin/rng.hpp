#pragma once

// Counter-based deterministic RNG. Every sampling API takes a 64-bit seed and
// the stream it produces is a pure function of that seed, so reports are
// bit-reproducible across runs and platforms. splitmix64 core: the state walks
// a fixed gamma and the output is a finalizing hash of the counter.

#include <cmath>
#include <cstdint>

namespace khinchin {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [-1, 1).
  double symmetric_uniform() { return 2.0 * uniform() - 1.0; }

  // Rademacher sign.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // Standard normal via Marsaglia polar; consumes a data-dependent number of
  // uniforms, which is fine because the stream itself is deterministic.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    for (;;) {
      const double x = symmetric_uniform();
      const double y = symmetric_uniform();
      const double r2 = x * x + y * y;
      if (r2 > 0.0 && r2 < 1.0) {
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = y * f;
        have_spare_ = true;
        return x * f;
      }
    }
  }

  // Uniform direction on the unit sphere in R^3.
  void sphere_direction(double& x, double& y, double& z) {
    for (;;) {
      x = gaussian();
      y = gaussian();
      z = gaussian();
      const double n = std::sqrt(x * x + y * y + z * z);
      if (n > 1e-12) {
        x /= n; y /= n; z /= n;
        return;
      }
    }
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace khinchin
