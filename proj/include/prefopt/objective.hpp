#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>

#include "prefopt/sampling.hpp"

namespace prefopt {

// A stochastic objective exposes one-sample noisy evaluation plus, when
// analytically known, the expected value and expected gradient. Objectives
// are immutable after construction; callers supply their own streams.
template <typename Scalar>
class StochasticObjective {
 public:
  virtual ~StochasticObjective() = default;

  virtual int dimension() const = 0;

  // One noisy sample. Must be finite for finite x.
  virtual Scalar evaluate(const Vector<Scalar>& x, SplitMix64& rng) const = 0;

  virtual std::optional<Scalar> expected_value(const Vector<Scalar>& /*x*/) const {
    return std::nullopt;
  }
  virtual std::optional<Vector<Scalar>> expected_gradient(
      const Vector<Scalar>& /*x*/) const {
    return std::nullopt;
  }

 protected:
  void check_dimension(const Vector<Scalar>& x) const {
    if (x.size() != dimension())
      throw std::invalid_argument("objective: dimension mismatch");
  }
};

// f(x, xi) = ||x||^2 + xi, xi ~ N(0, noise_std^2). Smoothness constant 2.
template <typename Scalar>
class QuadraticObjective final : public StochasticObjective<Scalar> {
 public:
  QuadraticObjective(int d, Scalar noise_std) : d_(d), noise_std_(noise_std) {
    if (d < 1) throw std::invalid_argument("quadratic_objective: d must be >= 1");
    if (noise_std < Scalar(0))
      throw std::invalid_argument("quadratic_objective: noise_std must be >= 0");
  }

  int dimension() const override { return d_; }

  Scalar evaluate(const Vector<Scalar>& x, SplitMix64& rng) const override {
    this->check_dimension(x);
    // The noise draw happens even when noise_std is zero so that stream
    // positions do not depend on the noise setting.
    const Scalar xi = noise_std_ * static_cast<Scalar>(rng.normal());
    return x.squaredNorm() + xi;
  }

  std::optional<Scalar> expected_value(const Vector<Scalar>& x) const override {
    this->check_dimension(x);
    return x.squaredNorm();
  }

  std::optional<Vector<Scalar>> expected_gradient(
      const Vector<Scalar>& x) const override {
    this->check_dimension(x);
    return Vector<Scalar>(2 * x);
  }

  Scalar noise_std() const { return noise_std_; }

 private:
  int d_;
  Scalar noise_std_;
};

// f(x, xi) = sum_i (x_i^2 + cos(3 x_i)) + xi. Smooth (constant <= 11),
// multiple stationary points per coordinate.
template <typename Scalar>
class NonconvexObjective final : public StochasticObjective<Scalar> {
 public:
  NonconvexObjective(int d, Scalar noise_std) : d_(d), noise_std_(noise_std) {
    if (d < 1) throw std::invalid_argument("nonconvex_objective: d must be >= 1");
    if (noise_std < Scalar(0))
      throw std::invalid_argument("nonconvex_objective: noise_std must be >= 0");
  }

  int dimension() const override { return d_; }

  Scalar evaluate(const Vector<Scalar>& x, SplitMix64& rng) const override {
    this->check_dimension(x);
    const Scalar xi = noise_std_ * static_cast<Scalar>(rng.normal());
    return smooth_part(x) + xi;
  }

  std::optional<Scalar> expected_value(const Vector<Scalar>& x) const override {
    this->check_dimension(x);
    return smooth_part(x);
  }

  std::optional<Vector<Scalar>> expected_gradient(
      const Vector<Scalar>& x) const override {
    this->check_dimension(x);
    Vector<Scalar> g(d_);
    for (int i = 0; i < d_; ++i)
      g[i] = 2 * x[i] - 3 * std::sin(3 * x[i]);
    return g;
  }

 private:
  Scalar smooth_part(const Vector<Scalar>& x) const {
    Scalar s = 0;
    for (int i = 0; i < d_; ++i) s += x[i] * x[i] + std::cos(3 * x[i]);
    return s;
  }

  int d_;
  Scalar noise_std_;
};

template <typename Scalar = double>
std::unique_ptr<StochasticObjective<Scalar>> quadratic_objective(int d,
                                                                 Scalar noise_std) {
  return std::make_unique<QuadraticObjective<Scalar>>(d, noise_std);
}

template <typename Scalar = double>
std::unique_ptr<StochasticObjective<Scalar>> nonconvex_objective(int d,
                                                                 Scalar noise_std) {
  return std::make_unique<NonconvexObjective<Scalar>>(d, noise_std);
}

// Forwarding wrapper that counts evaluate() calls. Used to audit the
// two-evaluations-per-comparison accounting.
template <typename Scalar>
class CountingObjective final : public StochasticObjective<Scalar> {
 public:
  explicit CountingObjective(const StochasticObjective<Scalar>& inner)
      : inner_(inner) {}

  int dimension() const override { return inner_.dimension(); }

  Scalar evaluate(const Vector<Scalar>& x, SplitMix64& rng) const override {
    ++count_;
    return inner_.evaluate(x, rng);
  }

  std::optional<Scalar> expected_value(const Vector<Scalar>& x) const override {
    return inner_.expected_value(x);
  }
  std::optional<Vector<Scalar>> expected_gradient(
      const Vector<Scalar>& x) const override {
    return inner_.expected_gradient(x);
  }

  long long evaluations() const { return count_; }

 private:
  const StochasticObjective<Scalar>& inner_;
  mutable long long count_ = 0;
};

}  // namespace prefopt
