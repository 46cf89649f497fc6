#include <cmath>
#include <vector>

#include <doctest.h>

#include "prefopt/lqg.hpp"
#include "prefopt/metrics.hpp"
#include "prefopt/objective.hpp"

using prefopt::cost_error_metric;
using prefopt::estimate_cd;
using prefopt::grad_norm_metric;
using prefopt::InsufficientData;
using prefopt::param_error_metric;
using prefopt::quadratic_objective;
using prefopt::rate_slope;
using prefopt::SplitMix64;
using prefopt::StochasticObjective;
using prefopt::TrialTrace;
using prefopt::UnsupportedMetric;
using Vec = prefopt::Vector<double>;

namespace {

// Evaluation-only objective; exposes neither expectation nor gradient.
class OpaqueObjective final : public StochasticObjective<double> {
 public:
  int dimension() const override { return 2; }
  double evaluate(const Vec& x, SplitMix64&) const override {
    return x.squaredNorm();
  }
};

TrialTrace<double> trace_from_series(const std::vector<double>& series) {
  TrialTrace<double> tr;
  tr.metric_names = {"m"};
  tr.rows = static_cast<long>(series.size());
  tr.values.resize(tr.rows, 1);
  for (long t = 0; t < tr.rows; ++t)
    tr.values(t, 0) = series[static_cast<std::size_t>(t)];
  return tr;
}

}  // namespace

TEST_CASE("gradient norm metric on the quadratic") {
  const auto f = quadratic_objective<double>(2, 0.0);
  const auto m = grad_norm_metric(*f);
  CHECK(m.name == "grad_norm");
  Vec x(2);
  x << 3, 4;
  CHECK(m.compute(x) == 10.0);
  CHECK(m.compute(Vec::Zero(2)) == 0.0);
}

TEST_CASE("gradient norm metric requires gradient access") {
  OpaqueObjective f;
  CHECK_THROWS_AS((void)grad_norm_metric(f), UnsupportedMetric);
}

TEST_CASE("parameter error metric") {
  Vec target(2);
  target << 1, 2;
  const auto m = param_error_metric(target);
  Vec x(2);
  x << 4, 6;
  CHECK(m.compute(x) == 5.0);
  CHECK(m.compute(target) == 0.0);
  CHECK_THROWS_AS((void)m.compute(Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("cost error metric uses the expected value") {
  const auto f = quadratic_objective<double>(2, 0.7);
  const auto m = cost_error_metric(*f, 1.0);
  Vec x(2);
  x << 2, 1;
  CHECK(m.compute(x) == 4.0);  // |5 - 1|
  OpaqueObjective opaque;
  CHECK_THROWS_AS((void)cost_error_metric<double>(opaque, 0.0), UnsupportedMetric);
}

TEST_CASE("cost error at a perturbed gain is positive") {
  prefopt::LqgSystem<double> sys;
  const auto obj = prefopt::lqg_objective(sys);
  const double kstar = prefopt::riccati_optimal_gain(sys);
  const auto m = cost_error_metric(*obj, prefopt::expected_cost(sys, kstar));
  CHECK(m.compute(Vec::Constant(1, kstar + 1.0)) > 0.0);
}

TEST_CASE("rate slope recovers the exponent of a power-law series") {
  // Series m_t = t^{-1/2}: the running average is ~ 2 t^{-1/2}, so the
  // second-half fit sits within 0.01 of -0.5 for a long trace.
  const long T = 100000;
  std::vector<double> series(static_cast<std::size_t>(T + 1), 1.0);
  for (long t = 1; t <= T; ++t)
    series[static_cast<std::size_t>(t)] = 1.0 / std::sqrt(static_cast<double>(t));
  std::vector<TrialTrace<double>> traces = {trace_from_series(series)};
  CHECK(rate_slope(traces, "m") == doctest::Approx(-0.5).epsilon(1).scale(0.01));
}

TEST_CASE("rate slope of a constant series is zero") {
  std::vector<double> series(101, 2.5);
  std::vector<TrialTrace<double>> traces = {trace_from_series(series),
                                            trace_from_series(series)};
  CHECK(rate_slope(traces, "m") == doctest::Approx(0.0).epsilon(1).scale(1e-12));
}

TEST_CASE("rate slope across distinct budgets") {
  // Constant series at level T^{-1/2} per budget: the across-budget fit is
  // exactly -1/2 up to floating point.
  std::vector<TrialTrace<double>> traces;
  for (long T = 100; traces.size() < 12; T = T * 3 / 2) {
    const double level = 1.0 / std::sqrt(static_cast<double>(T));
    traces.push_back(
        trace_from_series(std::vector<double>(static_cast<std::size_t>(T + 1), level)));
  }
  CHECK(rate_slope(traces, "m") == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("rate slope data requirements") {
  // 4 second-half points from T=8.
  std::vector<double> shorty(9, 1.0);
  std::vector<TrialTrace<double>> traces = {trace_from_series(shorty)};
  CHECK_THROWS_AS((void)rate_slope(traces, "m"), InsufficientData);

  // 3 budgets -> 3 points.
  traces = {trace_from_series(std::vector<double>(11, 1.0)),
            trace_from_series(std::vector<double>(21, 1.0)),
            trace_from_series(std::vector<double>(41, 1.0))};
  CHECK_THROWS_AS((void)rate_slope(traces, "m"), InsufficientData);

  CHECK_THROWS_AS((void)rate_slope(std::vector<TrialTrace<double>>{}, "m"),
                  InsufficientData);

  traces = {trace_from_series(std::vector<double>(101, 1.0))};
  CHECK_THROWS_AS((void)rate_slope(traces, "other"), std::invalid_argument);
}

TEST_CASE("dimension constant estimates") {
  SplitMix64 rng(31415);

  // d=1: |u_1| = 1 identically.
  CHECK(estimate_cd(1, 10000, rng) == 1.0);

  // Closed forms: c_2 = 2/pi, c_3 = 1/2, c_5 = 3/8.
  CHECK(estimate_cd(2, 400000, rng) ==
        doctest::Approx(2.0 / std::acos(-1.0)).epsilon(1).scale(0.003));
  CHECK(estimate_cd(3, 400000, rng) == doctest::Approx(0.5).epsilon(1).scale(0.003));
  CHECK(estimate_cd(5, 400000, rng) ==
        doctest::Approx(0.375).epsilon(1).scale(0.003));

  CHECK_THROWS_AS((void)estimate_cd(3, 5000, rng), std::invalid_argument);
  CHECK_THROWS_AS((void)estimate_cd(0, 10000, rng), std::invalid_argument);
}

TEST_CASE("dimension constant decreases while c_d*sqrt(d) stays bounded") {
  SplitMix64 rng(999);
  double prev = 1.1;
  for (int d : {1, 2, 3, 5, 10}) {
    const double cd = estimate_cd(d, 100000, rng);
    CHECK(cd < prev);
    const double scaled = cd * std::sqrt(static_cast<double>(d));
    CHECK(scaled > 0.5);
    CHECK(scaled <= 1.0 + 1e-12);
    prev = cd;
  }
}
