#include <cmath>

#include <doctest.h>

#include "prefopt/lqg.hpp"

using prefopt::expected_cost;
using prefopt::kCostCap;
using prefopt::LqgObjective;
using prefopt::lqg_objective;
using prefopt::LqgSystem;
using prefopt::perturbed_init;
using prefopt::riccati_optimal_gain;
using prefopt::rollout_cost;
using prefopt::SplitMix64;
using Vec = prefopt::Vector<double>;

namespace {

LqgSystem<double> benchmark_system() { return LqgSystem<double>{}; }

}  // namespace

TEST_CASE("deadbeat gain pays only the first stage") {
  // K = -11 zeroes the closed loop (A + BK = 0); with sigma = 0 the cost is
  // exactly (Q + R K^2) x0^2 = 122.
  auto sys = benchmark_system();
  SplitMix64 rng(1);
  CHECK(expected_cost(sys, -11.0) == 122.0);
  CHECK(rollout_cost(sys, -11.0, rng) == 122.0);
}

TEST_CASE("deadbeat gain with process noise has a geometric correction") {
  // m_t = sigma^2 for t >= 1, so the cost is
  // 122 * (1 + sigma^2 * sum_{t=1..50} gamma^t).
  auto sys = benchmark_system();
  sys.noise_std = 0.01;
  CHECK(expected_cost(sys, -11.0) ==
        doctest::Approx(122.0284666661547).epsilon(1e-12));
}

TEST_CASE("stable gain matches the closed-form geometric sum") {
  // K = -5: closed loop 0.6, ratio gamma*0.36 = 0.252, stage 26.
  auto sys = benchmark_system();
  const double r = 0.7 * 0.36;
  const double closed_form = 26.0 * (1.0 - std::pow(r, 51)) / (1.0 - r);
  CHECK(expected_cost(sys, -5.0) == doctest::Approx(closed_form).epsilon(1e-14));
  CHECK(expected_cost(sys, -5.0) ==
        doctest::Approx(34.759358288770045).epsilon(1e-12));
}

TEST_CASE("zero initial state and zero noise cost nothing") {
  auto sys = benchmark_system();
  sys.x0_state = 0.0;
  SplitMix64 rng(2);
  CHECK(expected_cost(sys, 3.0) == 0.0);
  CHECK(rollout_cost(sys, 3.0, rng) == 0.0);
}

TEST_CASE("heavily unstable policies hit the cost cap") {
  auto sys = benchmark_system();
  SplitMix64 rng(3);
  CHECK(expected_cost(sys, 10.0) == kCostCap);
  CHECK(rollout_cost(sys, 10.0, rng) == kCostCap);
  // An unstable pole whose discounted product stays below 1 remains finite.
  CHECK(expected_cost(sys, 0.0) < kCostCap);
}

TEST_CASE("rollouts consume one noise draw per step regardless of sigma") {
  auto quiet = benchmark_system();
  auto loud = benchmark_system();
  loud.noise_std = 0.5;
  SplitMix64 a(9), b(9);
  (void)rollout_cost(quiet, -1.0, a);
  (void)rollout_cost(loud, -1.0, b);
  CHECK(a.state() == b.state());
}

TEST_CASE("rollout cost is nonnegative") {
  auto sys = benchmark_system();
  sys.noise_std = 0.3;
  SplitMix64 rng(17);
  for (double k : {-11.0, -5.0, -0.4, 0.0, 1.0})
    for (int i = 0; i < 50; ++i) CHECK(rollout_cost(sys, k, rng) >= 0.0);
}

TEST_CASE("riccati gain matches the frozen fixed point and is a local minimum") {
  auto sys = benchmark_system();
  const double kstar = riccati_optimal_gain(sys);
  CHECK(kstar == doctest::Approx(-0.40306532712184545).epsilon(1e-9));

  // Local optimality of the long-horizon cost around K*.
  auto longsys = sys;
  longsys.horizon = 500;
  const double at = expected_cost(longsys, kstar);
  CHECK(at <= expected_cost(longsys, kstar + 1e-3));
  CHECK(at <= expected_cost(longsys, kstar - 1e-3));
}

TEST_CASE("riccati limit cases") {
  auto sys = benchmark_system();
  sys.gamma = 1e-12;
  CHECK(std::abs(riccati_optimal_gain(sys)) < 1e-9);

  auto noise_only = benchmark_system();
  noise_only.A = 0.0;
  CHECK(riccati_optimal_gain(noise_only) == 0.0);
}

TEST_CASE("monte carlo rollouts agree with the analytic expectation") {
  auto sys = benchmark_system();
  sys.noise_std = 0.05;
  const double kstar = riccati_optimal_gain(sys);
  const double expect = expected_cost(sys, kstar);
  SplitMix64 rng(2718);
  const int n = 30000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = rollout_cost(sys, kstar, rng);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - expect) < 4 * se);
}

TEST_CASE("perturbed initialization is uniform on [kstar, kstar+1)") {
  const double kstar = -0.403;
  SplitMix64 rng(123);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double k0 = perturbed_init(kstar, rng);
    REQUIRE(k0 >= kstar);
    REQUIRE(k0 < kstar + 1.0);
    sum += k0;
  }
  CHECK(sum / n == doctest::Approx(kstar + 0.5).epsilon(1).scale(0.003));
}

TEST_CASE("objective wrapper forwards rollout, expectation, and gradient") {
  auto sys = benchmark_system();
  sys.noise_std = 0.01;
  const auto obj = lqg_objective(sys);
  CHECK(obj->dimension() == 1);

  SplitMix64 a(5), b(5);
  const Vec k = Vec::Constant(1, -1.0);
  CHECK(obj->evaluate(k, a) == rollout_cost(sys, -1.0, b));
  CHECK(*obj->expected_value(k) == expected_cost(sys, -1.0));

  // Gradient vanishes at the Riccati gain up to the finite-horizon tail.
  const double kstar = riccati_optimal_gain(sys);
  const Vec g = *obj->expected_gradient(Vec::Constant(1, kstar));
  CHECK(std::abs(g[0]) < 1e-3);

  // The finite-difference step is small enough to be self-consistent.
  const Vec probe = Vec::Constant(1, -0.9);
  const double wide =
      (expected_cost(sys, -0.9 + 1e-4) - expected_cost(sys, -0.9 - 1e-4)) / 2e-4;
  const Vec gp = *obj->expected_gradient(probe);
  CHECK(gp[0] == doctest::Approx(wide).epsilon(1e-6));
}

TEST_CASE("system validation") {
  auto sys = benchmark_system();
  sys.Q = 0.0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
  sys = benchmark_system();
  sys.gamma = 1.0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
  sys = benchmark_system();
  sys.horizon = 0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
  sys = benchmark_system();
  sys.noise_std = -0.1;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
}
