#pragma once

#include <optional>
#include <stdexcept>

#include "prefopt/comparison.hpp"

namespace prefopt {

enum class EstimatorKind { psgd_u, psgd_g, zo_two_point };

inline const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::psgd_u: return "psgd_u";
    case EstimatorKind::psgd_g: return "psgd_g";
    case EstimatorKind::zo_two_point: return "zo_two_point";
  }
  return "?";
}

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::psgd_u;
  double delta = 0.01;
  int dimension = 1;
  // Scale applied to feedback * direction; defaults to dimension / delta.
  std::optional<double> coefficient;

  double scale() const {
    if (coefficient) return *coefficient;
    return static_cast<double>(dimension) / delta;
  }

  void validate() const {
    if (delta <= 0) throw std::invalid_argument("estimator: delta must be > 0");
    if (dimension < 1)
      throw std::invalid_argument("estimator: dimension must be >= 1");
  }
};

// g = scale * feedback * direction. For sign estimators feedback is the
// comparison outcome in {+1, -1}; for the two-point estimator it is the raw
// value difference.
template <typename Scalar>
struct GradientEstimate {
  Vector<Scalar> g;
  Scalar scale;
  Scalar feedback;
  Vector<Scalar> direction;
};

// The three randomness sources one estimator call may touch.
struct OracleStreams {
  SplitMix64& perturbation;
  SplitMix64& noise_1;
  SplitMix64& noise_2;
};

// Sign feedback with a uniform sphere direction:
//   g = (d / delta) * sgn(f(x + delta u, xi) - f(x, zeta)) * u,  ||u|| = 1.
// The norm of g equals d / delta on every sample, not just in expectation.
template <typename Scalar>
GradientEstimate<Scalar> estimate_psgd_u(const StochasticObjective<Scalar>& obj,
                                         const Vector<Scalar>& x,
                                         const EstimatorConfig& cfg,
                                         OracleStreams& rngs,
                                         Comparator<Scalar>* oracle = nullptr,
                                         long t = 0) {
  cfg.validate();
  Vector<Scalar> u = sample_unit_sphere<Scalar>(rngs.perturbation, cfg.dimension);
  Vector<Scalar> x1 = x + Scalar(cfg.delta) * u;
  int outcome;
  if (oracle != nullptr) {
    outcome = oracle->compare_points(x1, x, t);
  } else {
    outcome = compare(obj, x1, x, rngs.noise_1, rngs.noise_2);
  }
  const Scalar scale = static_cast<Scalar>(cfg.scale());
  GradientEstimate<Scalar> est;
  est.scale = scale;
  est.feedback = static_cast<Scalar>(outcome);
  est.direction = u;
  est.g = scale * est.feedback * u;
  return est;
}

// Same construction with an unnormalized Gaussian direction.
template <typename Scalar>
GradientEstimate<Scalar> estimate_psgd_g(const StochasticObjective<Scalar>& obj,
                                         const Vector<Scalar>& x,
                                         const EstimatorConfig& cfg,
                                         OracleStreams& rngs,
                                         Comparator<Scalar>* oracle = nullptr,
                                         long t = 0) {
  cfg.validate();
  Vector<Scalar> u = sample_gaussian<Scalar>(rngs.perturbation, cfg.dimension);
  Vector<Scalar> x1 = x + Scalar(cfg.delta) * u;
  int outcome;
  if (oracle != nullptr) {
    outcome = oracle->compare_points(x1, x, t);
  } else {
    outcome = compare(obj, x1, x, rngs.noise_1, rngs.noise_2);
  }
  const Scalar scale = static_cast<Scalar>(cfg.scale());
  GradientEstimate<Scalar> est;
  est.scale = scale;
  est.feedback = static_cast<Scalar>(outcome);
  est.direction = u;
  est.g = scale * est.feedback * u;
  return est;
}

// Bandit two-point baseline: the raw value difference replaces its sign.
//   g = (d / delta) * (f(x + delta u, xi) - f(x, zeta)) * u.
template <typename Scalar>
GradientEstimate<Scalar> estimate_zo_two_point(
    const StochasticObjective<Scalar>& obj, const Vector<Scalar>& x,
    const EstimatorConfig& cfg, OracleStreams& rngs) {
  cfg.validate();
  Vector<Scalar> u = sample_unit_sphere<Scalar>(rngs.perturbation, cfg.dimension);
  Vector<Scalar> x1 = x + Scalar(cfg.delta) * u;
  const Scalar f1 = obj.evaluate(x1, rngs.noise_1);
  const Scalar f2 = obj.evaluate(x, rngs.noise_2);
  const Scalar scale = static_cast<Scalar>(cfg.scale());
  GradientEstimate<Scalar> est;
  est.scale = scale;
  est.feedback = f1 - f2;
  est.direction = u;
  est.g = scale * est.feedback * u;
  return est;
}

// Dispatch on cfg.kind. The interactive oracle is only meaningful for sign
// estimators; the two-point estimator needs raw values.
template <typename Scalar>
GradientEstimate<Scalar> estimate_gradient(const StochasticObjective<Scalar>& obj,
                                           const Vector<Scalar>& x,
                                           const EstimatorConfig& cfg,
                                           OracleStreams& rngs,
                                           Comparator<Scalar>* oracle = nullptr,
                                           long t = 0) {
  switch (cfg.kind) {
    case EstimatorKind::psgd_u:
      return estimate_psgd_u(obj, x, cfg, rngs, oracle, t);
    case EstimatorKind::psgd_g:
      return estimate_psgd_g(obj, x, cfg, rngs, oracle, t);
    case EstimatorKind::zo_two_point:
      if (oracle != nullptr)
        throw std::invalid_argument(
            "zo_two_point needs value feedback, not a comparison oracle");
      return estimate_zo_two_point(obj, x, cfg, rngs);
  }
  throw std::invalid_argument("unknown estimator kind");
}

}  // namespace prefopt
