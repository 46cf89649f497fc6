#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "prefopt/rng.hpp"

namespace prefopt {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Direction with i.i.d. standard normal coordinates, not normalized.
template <typename Scalar = double>
Vector<Scalar> sample_gaussian(SplitMix64& rng, int d) {
  if (d < 1) throw std::invalid_argument("sample_gaussian: dimension must be >= 1");
  Vector<Scalar> u(d);
  for (int i = 0; i < d; ++i) u[i] = static_cast<Scalar>(rng.normal());
  return u;
}

// Uniform direction on the unit sphere embedded in R^d; for d = 1 this is
// {+1, -1}. Resamples on the measure-zero event of a zero vector.
template <typename Scalar = double>
Vector<Scalar> sample_unit_sphere(SplitMix64& rng, int d) {
  if (d < 1) throw std::invalid_argument("sample_unit_sphere: dimension must be >= 1");
  for (;;) {
    Vector<Scalar> u = sample_gaussian<Scalar>(rng, d);
    const Scalar n = u.norm();
    if (n > Scalar(0)) return u / n;
  }
}

}  // namespace prefopt
