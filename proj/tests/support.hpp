#pragma once

// Random draws shared by the test suites.

#include <random>

#include "sinh_torus/sinh_torus.hpp"

namespace sinh_torus::fixtures {

inline SkewMatrix4 random_skew(std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> u(-bound, bound);
  return skew_from_params(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
}

/// A rotation drawn as e^{B} with B uniform in a box large enough to reach
/// all of SO(4).
inline Matrix4 random_rotation(std::mt19937_64& rng) {
  return isometry_exp(random_skew(rng, kPi), 1.0);
}

/// Seed on SO(4) x R^2.
inline FrameState random_seed(std::mt19937_64& rng, double rs_bound = 1.0) {
  std::uniform_real_distribution<double> u(-rs_bound, rs_bound);
  const Matrix4 q = random_rotation(rng);
  const double r = u(rng);
  const double s = u(rng);
  return FrameState::from_matrix(q, r, s);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace sinh_torus::fixtures
