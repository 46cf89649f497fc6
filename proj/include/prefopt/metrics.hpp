#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefopt/optimizer.hpp"

namespace prefopt {

class UnsupportedMetric : public std::runtime_error {
 public:
  explicit UnsupportedMetric(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

// ||grad F(x_t)||. Requires the objective to expose an expected gradient
// (analytic or finite difference); checked once at construction.
template <typename Scalar>
MetricDef<Scalar> grad_norm_metric(const StochasticObjective<Scalar>& obj) {
  const Vector<Scalar> probe = Vector<Scalar>::Zero(obj.dimension());
  if (!obj.expected_gradient(probe))
    throw UnsupportedMetric("grad_norm: objective has no gradient access");
  const auto* o = &obj;
  return {"grad_norm", [o](const Vector<Scalar>& x) -> Scalar {
            return o->expected_gradient(x)->norm();
          }};
}

// ||x_t - target||.
template <typename Scalar>
MetricDef<Scalar> param_error_metric(const Vector<Scalar>& target) {
  return {"param_error", [target](const Vector<Scalar>& x) -> Scalar {
            if (x.size() != target.size())
              throw std::invalid_argument("param_error: dimension mismatch");
            return (x - target).norm();
          }};
}

// |F(x_t) - target_value| using the objective's expected value.
template <typename Scalar>
MetricDef<Scalar> cost_error_metric(const StochasticObjective<Scalar>& obj,
                                    Scalar target_value) {
  const Vector<Scalar> probe = Vector<Scalar>::Zero(obj.dimension());
  if (!obj.expected_value(probe))
    throw UnsupportedMetric("cost_error: objective has no expected value");
  const auto* o = &obj;
  return {"cost_error", [o, target_value](const Vector<Scalar>& x) -> Scalar {
            return std::abs(static_cast<double>(*o->expected_value(x) -
                                                target_value));
          }};
}

namespace detail {

inline double ls_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  const std::size_t n = lx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0) throw InsufficientData("rate_slope: degenerate abscissa");
  return sxy / sxx;
}

inline double safe_log(double v) { return std::log(std::max(v, 1e-300)); }

}  // namespace detail

// Least-squares slope of log(running average of a metric) against log t.
//
// Traces of one common length: the metric is averaged across traces
// pointwise, running averages over iterations 1..t are formed, and the fit
// uses the second half of iterations (the transient is skipped).
//
// Traces at distinct budgets: each budget contributes one point, the
// cross-trace mean of the full-run average (1/T) sum_{t=1..T} m_t at
// abscissa T, and the fit runs over budgets.
//
// Either way at least 10 fit points are required.
template <typename Scalar>
double rate_slope(const std::vector<TrialTrace<Scalar>>& traces,
                  const std::string& metric) {
  if (traces.empty()) throw InsufficientData("rate_slope: no traces");

  // budget -> (sum of per-trace full-run averages, count, summed series)
  std::map<long, std::pair<std::vector<double>, long>> groups;
  for (const auto& tr : traces) {
    const auto it =
        std::find(tr.metric_names.begin(), tr.metric_names.end(), metric);
    if (it == tr.metric_names.end())
      throw std::invalid_argument("rate_slope: metric not recorded: " + metric);
    const auto col = static_cast<Eigen::Index>(it - tr.metric_names.begin());
    if (tr.rows < 2) throw InsufficientData("rate_slope: trace too short");
    auto& [sum_series, count] = groups[tr.rows];
    if (sum_series.empty()) sum_series.assign(static_cast<std::size_t>(tr.rows), 0.0);
    for (long t = 0; t < tr.rows; ++t)
      sum_series[static_cast<std::size_t>(t)] +=
          static_cast<double>(tr.values(t, col));
    ++count;
  }

  std::vector<double> lx, ly;
  if (groups.size() == 1) {
    // One common budget: fit running averages over the second half.
    const auto& [sum_series, count] = groups.begin()->second;
    const long T = static_cast<long>(sum_series.size()) - 1;
    std::vector<double> mean(sum_series.size());
    for (std::size_t i = 0; i < sum_series.size(); ++i)
      mean[i] = sum_series[i] / static_cast<double>(count);
    double acc = 0;
    for (long t = 1; t <= T; ++t) {
      acc += mean[static_cast<std::size_t>(t)];
      if (t > T / 2) {
        lx.push_back(std::log(static_cast<double>(t)));
        ly.push_back(detail::safe_log(acc / static_cast<double>(t)));
      }
    }
  } else {
    // Distinct budgets: one point per budget.
    for (const auto& [rows, entry] : groups) {
      const auto& [sum_series, count] = entry;
      const long T = rows - 1;
      double acc = 0;
      for (long t = 1; t <= T; ++t) acc += sum_series[static_cast<std::size_t>(t)];
      const double avg = acc / static_cast<double>(T) / static_cast<double>(count);
      lx.push_back(std::log(static_cast<double>(T)));
      ly.push_back(detail::safe_log(avg));
    }
  }

  if (lx.size() < 10)
    throw InsufficientData("rate_slope: need at least 10 fit points, have " +
                           std::to_string(lx.size()));
  return detail::ls_slope(lx, ly);
}

// Monte Carlo estimate of E|u_1| for u uniform on the unit sphere in R^d,
// the dimension constant in the descent-direction bound.
inline double estimate_cd(int d, long n_samples, SplitMix64& rng) {
  if (d < 1) throw std::invalid_argument("estimate_cd: d must be >= 1");
  if (n_samples < 10000)
    throw std::invalid_argument("estimate_cd: need at least 1e4 samples");
  double acc = 0;
  for (long i = 0; i < n_samples; ++i)
    acc += std::abs(sample_unit_sphere<double>(rng, d)[0]);
  return acc / static_cast<double>(n_samples);
}

}  // namespace prefopt
