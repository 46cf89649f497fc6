#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prefopt/estimators.hpp"

namespace prefopt {

// Metric callback: a pure function of the iterate. Metrics never consume
// optimizer streams, so enabling them cannot change a trajectory.
template <typename Scalar>
struct MetricDef {
  std::string name;
  std::function<Scalar(const Vector<Scalar>&)> compute;
};

template <typename Scalar>
struct OptimizerConfig {
  long T = 1;
  // Explicit step size; ignored when use_theorem_schedule is set. Zero is
  // allowed (degenerate no-move run), negative is rejected.
  Scalar eta = Scalar(0);
  bool use_theorem_schedule = false;
  Scalar delta = Scalar(0.01);
  EstimatorConfig estimator;
  Vector<Scalar> x0;
  std::uint64_t seed = 0;
  // Store every iterate in the trace (memory scales with T * d).
  bool record_points = false;

  void validate() const {
    if (T < 1) throw std::invalid_argument("optimizer: T must be >= 1");
    if (!use_theorem_schedule && eta < Scalar(0))
      throw std::invalid_argument("optimizer: eta must be >= 0");
    if (delta <= Scalar(0))
      throw std::invalid_argument("optimizer: delta must be > 0");
    if (x0.size() < 1) throw std::invalid_argument("optimizer: empty x0");
  }
};

// Step-size schedule: eta = T^{-1/2} with delta held constant.
inline std::pair<double, double> theorem_schedule(long T, double delta = 0.01) {
  if (T < 1) throw std::invalid_argument("theorem_schedule: T must be >= 1");
  return {std::pow(static_cast<double>(T), -0.5), delta};
}

// Per-iteration record of an optimization run. Row t holds the metrics at
// x_t before the update; row T is written after the final update, giving
// T + 1 rows for a completed run.
template <typename Scalar>
struct TrialTrace {
  std::vector<std::string> metric_names;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;  // rows x metrics
  std::vector<Vector<Scalar>> points;  // filled when record_points is set
  Vector<Scalar> final_x;
  long rows = 0;       // filled rows, T + 1 when completed
  bool diverged = false;
  bool aborted = false;
};

// Raised when an iterate leaves the trust region ||x|| <= 1e12 or turns
// non-finite. Carries the trace up to the failing iteration.
template <typename Scalar>
class Diverged : public std::runtime_error {
 public:
  Diverged(std::string what, TrialTrace<Scalar> partial)
      : std::runtime_error(std::move(what)), trace(std::move(partial)) {}
  TrialTrace<Scalar> trace;
};

inline constexpr double kDivergenceGuard = 1e12;

namespace detail {

template <typename Scalar>
void record_row(TrialTrace<Scalar>& trace, const Vector<Scalar>& x,
                const std::vector<MetricDef<Scalar>>& metrics, bool keep_point) {
  for (std::size_t m = 0; m < metrics.size(); ++m)
    trace.values(trace.rows, static_cast<Eigen::Index>(m)) = metrics[m].compute(x);
  if (keep_point) trace.points.push_back(x);
  ++trace.rows;
}

}  // namespace detail

// Core loop shared by the stochastic and interactive front ends. step(x, t)
// returns the gradient estimate used in x_{t+1} = x_t - eta * g_t.
template <typename Scalar, typename StepFn>
TrialTrace<Scalar> run_loop(const OptimizerConfig<Scalar>& cfg,
                            const std::vector<MetricDef<Scalar>>& metrics,
                            StepFn&& step) {
  cfg.validate();
  const Scalar eta =
      cfg.use_theorem_schedule
          ? static_cast<Scalar>(theorem_schedule(cfg.T).first)
          : cfg.eta;

  TrialTrace<Scalar> trace;
  trace.metric_names.reserve(metrics.size());
  for (const auto& m : metrics) trace.metric_names.push_back(m.name);
  trace.values.resize(cfg.T + 1, static_cast<Eigen::Index>(metrics.size()));

  Vector<Scalar> x = cfg.x0;
  for (long t = 0; t < cfg.T; ++t) {
    detail::record_row(trace, x, metrics, cfg.record_points);
    GradientEstimate<Scalar> est;
    try {
      est = step(x, t);
    } catch (const AbortTrial&) {
      // A cancelled interactive trial is a result, not an error: the rows
      // recorded so far are returned with the abort marker set.
      trace.values.conservativeResize(trace.rows, Eigen::NoChange);
      trace.aborted = true;
      trace.final_x = x;
      return trace;
    }
    x -= eta * est.g;
    if (!x.allFinite() || x.norm() > Scalar(kDivergenceGuard)) {
      trace.values.conservativeResize(trace.rows, Eigen::NoChange);
      trace.diverged = true;
      trace.final_x = x;
      throw Diverged<Scalar>("optimizer diverged at t=" + std::to_string(t),
                             trace);
    }
  }
  detail::record_row(trace, x, metrics, cfg.record_points);
  trace.final_x = x;
  return trace;
}

// Algorithm loop against a stochastic objective: sample a direction, obtain
// one comparison or value difference (two evaluations), update. The three
// streams are derived from cfg.seed by role.
template <typename Scalar>
TrialTrace<Scalar> run(const StochasticObjective<Scalar>& obj,
                       const OptimizerConfig<Scalar>& cfg,
                       const std::vector<MetricDef<Scalar>>& metrics = {}) {
  if (cfg.x0.size() != obj.dimension())
    throw std::invalid_argument("optimizer: x0 dimension mismatch");
  SplitMix64 perturbation(derive_seed(cfg.seed, role::perturbation));
  SplitMix64 noise_1(derive_seed(cfg.seed, role::objective_noise_1));
  SplitMix64 noise_2(derive_seed(cfg.seed, role::objective_noise_2));
  OracleStreams streams{perturbation, noise_1, noise_2};

  EstimatorConfig est = cfg.estimator;
  est.delta = static_cast<double>(cfg.delta);
  est.dimension = static_cast<int>(cfg.x0.size());

  return run_loop(cfg, metrics, [&](const Vector<Scalar>& x, long t) {
    return estimate_gradient(obj, x, est, streams,
                             static_cast<Comparator<Scalar>*>(nullptr), t);
  });
}

// Same loop with a human (or scripted) comparison oracle supplying the sign
// feedback. Only sign estimators are valid here.
template <typename Scalar>
TrialTrace<Scalar> run_with_oracle(Comparator<Scalar>& oracle,
                                   const OptimizerConfig<Scalar>& cfg,
                                   const std::vector<MetricDef<Scalar>>& metrics = {}) {
  if (cfg.estimator.kind == EstimatorKind::zo_two_point)
    throw std::invalid_argument(
        "interactive runs need a sign estimator, not zo_two_point");
  SplitMix64 perturbation(derive_seed(cfg.seed, role::perturbation));
  SplitMix64 noise_1(derive_seed(cfg.seed, role::objective_noise_1));
  SplitMix64 noise_2(derive_seed(cfg.seed, role::objective_noise_2));
  OracleStreams streams{perturbation, noise_1, noise_2};

  EstimatorConfig est = cfg.estimator;
  est.delta = static_cast<double>(cfg.delta);
  est.dimension = static_cast<int>(cfg.x0.size());

  // No objective exists in this mode; estimate_gradient never touches it
  // when an oracle is supplied.
  struct NullObjective final : StochasticObjective<Scalar> {
    int d;
    explicit NullObjective(int dim) : d(dim) {}
    int dimension() const override { return d; }
    Scalar evaluate(const Vector<Scalar>&, SplitMix64&) const override {
      throw std::logic_error("null objective evaluated");
    }
  } null_obj(static_cast<int>(cfg.x0.size()));

  return run_loop(cfg, metrics, [&](const Vector<Scalar>& x, long t) {
    return estimate_gradient<Scalar>(null_obj, x, est, streams, &oracle, t);
  });
}

}  // namespace prefopt
