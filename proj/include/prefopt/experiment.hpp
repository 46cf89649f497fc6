#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prefopt/lqg.hpp"
#include "prefopt/metrics.hpp"

namespace prefopt {

inline constexpr const char* kGeneratorId = "splitmix64-boxmuller-v1";
inline constexpr const char* kBuildId = "prefopt-0.1.0";

enum class Problem { quadratic, nonconvex, lqg };

const char* to_string(Problem p);

// One optimizer entry in an experiment. The id keys the random streams, so
// reordering the methods list never changes any trajectory.
struct MethodSpec {
  std::string id;
  EstimatorKind kind = EstimatorKind::psgd_u;
  double eta = 0.0;
  bool theorem_eta = false;
  double delta = 0.01;
  std::optional<double> coefficient;
};

struct ExperimentConfig {
  Problem problem = Problem::lqg;

  // Synthetic problems (quadratic, nonconvex).
  int dimension = 1;
  double noise_std = 0.0;
  std::vector<double> x0;  // empty: (1,...,1)/sqrt(d)

  // LQG problem.
  LqgSystem<double> lqg;

  std::vector<MethodSpec> methods;
  int trials = 10;
  long optimizer_T = 500;
  std::uint64_t base_seed = 42;
  // Empty: compute in memory, write nothing.
  std::string output_dir;
  // Empty: problem default (lqg: param_error + cost_error; else grad_norm).
  std::vector<std::string> metrics;
  int parallel = 1;

  void validate() const;
};

struct MethodAggregate {
  std::string id;
  std::vector<std::string> metrics;
  Eigen::MatrixXd mean;    // (T+1) x n_metrics, across completed trials
  Eigen::MatrixXd stddev;  // population standard deviation, same shape
  // First- and final-row metric values per trial; NaN rows mark diverged
  // trials.
  Eigen::MatrixXd trial_initials;  // trials x n_metrics
  Eigen::MatrixXd trial_finals;    // trials x n_metrics
  int diverged_trials = 0;
};

struct AggregateResult {
  ExperimentConfig config;
  std::vector<MethodAggregate> methods;
  std::uint64_t config_hash = 0;
};

// Runs trials x methods, aggregates mean and standard deviation across
// trials, and writes outputs when config.output_dir is nonempty. Starting
// points are shared across methods within a trial index.
AggregateResult run_experiment(const ExperimentConfig& cfg);

// Grid sweep with a reduced trial count (3): per method, the cell with the
// smallest final mean cost error wins; ties break to smaller eta, then
// smaller delta. Returns method id -> (eta, delta).
std::map<std::string, std::pair<double, double>> sweep_tuning(
    const ExperimentConfig& cfg, const std::vector<double>& eta_grid,
    const std::vector<double>& delta_grid);

// Writes trace_<method>.csv per method, experiment.json, and the two SVG
// figures. Returns the written paths.
std::vector<std::string> emit_outputs(const AggregateResult& result,
                                      const std::string& dir);

// Runs a single trial with the terminal comparison oracle over the given
// channels, then persists the trace and response log to config.output_dir
// (when nonempty). The single configured method must be a sign estimator
// with uniform directions.
TrialTrace<double> interactive_session(const ExperimentConfig& cfg,
                                       std::istream& in, std::ostream& out);

// Strict JSON config I/O: unknown keys are rejected at every level.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

// Problem plumbing shared by the harness and the acceptance checks.
std::unique_ptr<StochasticObjective<double>> make_objective(
    const ExperimentConfig& cfg);
std::vector<MetricDef<double>> make_metrics(
    const ExperimentConfig& cfg, const StochasticObjective<double>& obj,
    const std::vector<std::string>& names);
Vector<double> trial_start(const ExperimentConfig& cfg, int trial);

}  // namespace prefopt
