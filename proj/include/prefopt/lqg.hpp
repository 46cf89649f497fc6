#pragma once

#include <cmath>
#include <stdexcept>

#include "prefopt/objective.hpp"

namespace prefopt {

// Scalar discounted plant x_{k+1} = (A + B K) x_k + w_k with stage cost
// Q x^2 + R (K x)^2, discount gamma, process noise w ~ N(0, noise_std^2).
template <typename Scalar>
struct LqgSystem {
  Scalar A = Scalar(1.1);
  Scalar B = Scalar(0.1);
  Scalar Q = Scalar(1);
  Scalar R = Scalar(1);
  Scalar gamma = Scalar(0.7);
  Scalar noise_std = Scalar(0);
  int horizon = 50;
  Scalar x0_state = Scalar(1);

  void validate() const {
    if (Q <= Scalar(0) || R <= Scalar(0))
      throw std::invalid_argument("lqg: Q and R must be > 0");
    if (!(gamma > Scalar(0) && gamma < Scalar(1)))
      throw std::invalid_argument("lqg: gamma must be in (0, 1)");
    if (noise_std < Scalar(0))
      throw std::invalid_argument("lqg: noise_std must be >= 0");
    if (horizon < 1) throw std::invalid_argument("lqg: horizon must be >= 1");
  }
};

// Cost cap. Keeps comparisons well defined when a policy walks into heavy
// instability; below the cap values are untouched.
inline constexpr double kCostCap = 1e12;

// One noisy rollout of sum_{t=0}^{horizon} gamma^t (Q + R K^2) x_t^2.
// Exactly `horizon` noise draws are consumed regardless of noise_std, so
// stream positions do not depend on the noise setting.
template <typename Scalar>
Scalar rollout_cost(const LqgSystem<Scalar>& sys, Scalar K, SplitMix64& rng) {
  sys.validate();
  const Scalar closed = sys.A + sys.B * K;
  const Scalar stage = sys.Q + sys.R * K * K;
  Scalar x = sys.x0_state;
  Scalar disc = Scalar(1);
  Scalar total = Scalar(0);
  for (int t = 0; t <= sys.horizon; ++t) {
    total += disc * stage * x * x;
    disc *= sys.gamma;
    if (t < sys.horizon)
      x = closed * x + sys.noise_std * static_cast<Scalar>(rng.normal());
  }
  if (std::isnan(static_cast<double>(total)) || total > Scalar(kCostCap))
    total = Scalar(kCostCap);
  return total;
}

// Analytic E V(K) via the second-moment recursion
//   m_{t+1} = (A + B K)^2 m_t + noise_std^2,  m_0 = x0^2,
//   E V = sum_t gamma^t (Q + R K^2) m_t,
// capped at the same level as rollout_cost so the two stay comparable.
template <typename Scalar>
Scalar expected_cost(const LqgSystem<Scalar>& sys, Scalar K) {
  sys.validate();
  const Scalar closed2 = (sys.A + sys.B * K) * (sys.A + sys.B * K);
  const Scalar stage = sys.Q + sys.R * K * K;
  Scalar m = sys.x0_state * sys.x0_state;
  Scalar disc = Scalar(1);
  Scalar total = Scalar(0);
  for (int t = 0; t <= sys.horizon; ++t) {
    total += disc * stage * m;
    disc *= sys.gamma;
    m = closed2 * m + sys.noise_std * sys.noise_std;
  }
  if (std::isnan(static_cast<double>(total)) || total > Scalar(kCostCap))
    total = Scalar(kCostCap);
  return total;
}

// Optimal gain from the scalar discounted Riccati fixed point
//   P = Q + gamma A^2 P - gamma^2 A^2 B^2 P^2 / (R + gamma B^2 P),
//   K* = -gamma A B P / (R + gamma B^2 P).
// Converges for any stabilizable scalar pair; horizon and noise play no role.
template <typename Scalar>
Scalar riccati_optimal_gain(const LqgSystem<Scalar>& sys) {
  sys.validate();
  const Scalar g = sys.gamma;
  const Scalar A2 = sys.A * sys.A;
  const Scalar B2 = sys.B * sys.B;
  Scalar P = sys.Q;
  for (long it = 0; it < 1000000; ++it) {
    const Scalar denom = sys.R + g * B2 * P;
    const Scalar next = sys.Q + g * A2 * P - g * g * A2 * B2 * P * P / denom;
    if (std::abs(static_cast<double>(next - P)) < 1e-12) {
      P = next;
      return -g * sys.A * sys.B * P / (sys.R + g * B2 * P);
    }
    P = next;
  }
  throw std::runtime_error("riccati_optimal_gain: no convergence");
}

// K0 = K* + U with U uniform on [0, 1).
template <typename Scalar>
Scalar perturbed_init(Scalar kstar, SplitMix64& rng) {
  return kstar + static_cast<Scalar>(rng.uniform01());
}

// The rollout cost as a one-dimensional stochastic objective in K, with the
// analytic expected cost and its central finite difference (step 1e-6) as
// the expected value and gradient.
template <typename Scalar>
class LqgObjective final : public StochasticObjective<Scalar> {
 public:
  explicit LqgObjective(const LqgSystem<Scalar>& sys) : sys_(sys) {
    sys_.validate();
  }

  int dimension() const override { return 1; }

  Scalar evaluate(const Vector<Scalar>& x, SplitMix64& rng) const override {
    this->check_dimension(x);
    return rollout_cost(sys_, x[0], rng);
  }

  std::optional<Scalar> expected_value(const Vector<Scalar>& x) const override {
    this->check_dimension(x);
    return expected_cost(sys_, x[0]);
  }

  std::optional<Vector<Scalar>> expected_gradient(
      const Vector<Scalar>& x) const override {
    this->check_dimension(x);
    const Scalar h = Scalar(1e-6);
    Vector<Scalar> g(1);
    g[0] = (expected_cost(sys_, x[0] + h) - expected_cost(sys_, x[0] - h)) /
           (2 * h);
    return g;
  }

  const LqgSystem<Scalar>& system() const { return sys_; }

 private:
  LqgSystem<Scalar> sys_;
};

template <typename Scalar = double>
std::unique_ptr<StochasticObjective<Scalar>> lqg_objective(
    const LqgSystem<Scalar>& sys) {
  return std::make_unique<LqgObjective<Scalar>>(sys);
}

}  // namespace prefopt
