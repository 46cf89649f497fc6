#include <cstdint>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prefopt/experiment.hpp"

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "not a number: " + item);
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_list(s, flag)) out.push_back(static_cast<int>(v));
  return out;
}

void print_summary(const prefopt::AggregateResult& r) {
  const long last = r.config.optimizer_T;
  for (const auto& agg : r.methods) {
    std::cout << "method " << agg.id;
    if (agg.diverged_trials > 0)
      std::cout << " (" << agg.diverged_trials << "/" << r.config.trials
                << " trials diverged)";
    std::cout << "\n";
    for (std::size_t m = 0; m < agg.metrics.size(); ++m) {
      const auto col = static_cast<Eigen::Index>(m);
      std::printf("  final %-12s mean %.6g  std %.6g\n", agg.metrics[m].c_str(),
                  agg.mean(last, col), agg.stddev(last, col));
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-based stochastic optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, eta_list, delta_list, dims_list = "1,2,3,5,10";
  int trials = -1, parallel = -1;
  long samples = 1000000;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* run = app.add_subcommand("run", "Run a configured experiment");
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_option("--trials", trials, "Trial count (overrides config)");
  run->add_option("--seed", seed, "Base seed (overrides config)")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--parallel", parallel, "Worker threads (overrides config)");

  auto* tune = app.add_subcommand("tune", "Grid-search eta and delta per method");
  tune->add_option("--config", config_path, "JSON config path")->required();
  tune->add_option("--eta-grid", eta_list, "Comma-separated eta values")->required();
  tune->add_option("--delta-grid", delta_list, "Comma-separated delta values")
      ->required();

  auto* inter = app.add_subcommand("interactive",
                                   "Optimize with a human answering comparisons");
  inter->add_option("--config", config_path, "JSON config path")->required();
  inter->add_option("--out", out_dir, "Output directory (overrides config)");

  auto* cdt = app.add_subcommand("cd-table",
                                 "Estimate the mean first-coordinate magnitude "
                                 "of a unit-sphere sample per dimension");
  cdt->add_option("--dims", dims_list, "Comma-separated dimensions");
  cdt->add_option("--samples", samples, "Monte Carlo samples per dimension");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      prefopt::ExperimentConfig cfg = prefopt::load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (trials > 0) cfg.trials = trials;
      if (seed_set) cfg.base_seed = seed;
      if (parallel > 0) cfg.parallel = parallel;
      const auto result = prefopt::run_experiment(cfg);
      print_summary(result);
      if (!cfg.output_dir.empty())
        std::cout << "outputs written to " << cfg.output_dir << "\n";
    } else if (*tune) {
      prefopt::ExperimentConfig cfg = prefopt::load_config(config_path);
      const auto etas = parse_list(eta_list, "--eta-grid");
      const auto deltas = parse_list(delta_list, "--delta-grid");
      const auto best = prefopt::sweep_tuning(cfg, etas, deltas);
      for (const auto& [id, cell] : best)
        std::printf("method %-12s eta %.6g  delta %.6g\n", id.c_str(),
                    cell.first, cell.second);
    } else if (*inter) {
      prefopt::ExperimentConfig cfg = prefopt::load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto trace = prefopt::interactive_session(cfg, std::cin, std::cout);
      if (trace.aborted) {
        std::cout << "session aborted after " << (trace.rows - 1)
                  << " completed iterations; partial trace kept\n";
        return 1;
      }
      std::cout << "session complete: " << (trace.rows - 1) << " iterations\n";
    } else if (*cdt) {
      const auto dims = parse_int_list(dims_list, "--dims");
      std::printf("%6s %12s %12s\n", "d", "c_d", "c_d*sqrt(d)");
      for (int d : dims) {
        prefopt::SplitMix64 rng(prefopt::derive_seed(
            0x63642d7461626c65ull, static_cast<std::uint64_t>(d)));
        const double cd = prefopt::estimate_cd(d, samples, rng);
        std::printf("%6d %12.6f %12.6f\n", d, cd, cd * std::sqrt(double(d)));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
