#pragma once
// Random samplers and finite-difference helpers shared by the unit tests.

#include <cmath>
#include <functional>
#include <random>
#include <type_traits>

#include "milne/geometry.hpp"

namespace testing {

using milne::Mat3;
using milne::Vec3;

inline Vec3 rand_vec(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  return Vec3(u(rng), u(rng), u(rng));
}

inline Vec3 rand_in_ball(std::mt19937_64& rng, double r) {
  for (;;) {
    const Vec3 x = rand_vec(rng, r);
    if (x.norm() < r) return x;
  }
}

// symmetric positive definite, eigenvalues roughly in [lo, lo + spread]
inline Mat3 rand_spd(std::mt19937_64& rng, double lo = 0.5, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = u(rng);
  return lo * Mat3::Identity() + spread / 3.0 * A * A.transpose();
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

// central difference, fourth order
template <class F>
auto diff(F&& f, double x, double h = 1e-4) -> std::decay_t<decltype(f(x))> {
  return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}

}  // namespace testing
