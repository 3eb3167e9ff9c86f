#pragma once

#include "jhess/tensor.hpp"

#include <cstdint>
#include <random>

namespace jhess {

using Rng = std::mt19937_64;

/// Uniform sample on the unit sphere of ℝ^dim.
inline Vec random_unit(Rng& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(dim);
  double n = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    n = v.norm();
  } while (n == 0.0);
  return v / n;
}

/// Uniform sample in the closed ball of the given radius around `center`.
inline Vec random_in_ball(Rng& rng, const Vec& center, double radius) {
  const int dim = static_cast<int>(center.size());
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vec dir = random_unit(rng, dim);
  double r = radius * std::pow(uniform(rng), 1.0 / dim);
  return center + r * dir;
}

}  // namespace jhess
