#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace shiftmod {

// Seeded stream used for every random fixture, probe and disguise.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions are derived here rather than through <random>
// distributions, whose algorithms are implementation-defined:
//   uniform()  = (next() >> 11) * 2^-53              in [0, 1)
//   normal()   = Box-Muller on two uniforms, cosine branch only
//   index(n)   = next() % n
// so any implementation following these rules reproduces the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  // Uniform integer in [0, n). n must be positive.
  std::int64_t index(std::int64_t n) {
    return static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(n));
  }

  // Uniform integer in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) { return lo + index(hi - lo + 1); }

  bool coin(double p_true) { return uniform() < p_true; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace shiftmod
