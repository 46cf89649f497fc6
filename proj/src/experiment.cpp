#include "prefopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace prefopt {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(Problem p) {
  switch (p) {
    case Problem::quadratic: return "quadratic";
    case Problem::nonconvex: return "nonconvex";
    case Problem::lqg: return "lqg";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (optimizer_T < 1)
    throw std::invalid_argument("config: optimizer_T must be >= 1");
  if (parallel < 1) throw std::invalid_argument("config: parallel must be >= 1");
  if (methods.empty())
    throw std::invalid_argument("config: at least one method required");
  std::set<std::string> ids;
  for (const auto& m : methods) {
    if (m.id.empty()) throw std::invalid_argument("config: method id empty");
    if (!ids.insert(m.id).second)
      throw std::invalid_argument("config: duplicate method id: " + m.id);
    if (m.delta <= 0)
      throw std::invalid_argument("config: method delta must be > 0: " + m.id);
    if (!m.theorem_eta && m.eta < 0)
      throw std::invalid_argument("config: method eta must be >= 0: " + m.id);
  }
  if (problem == Problem::lqg) {
    lqg.validate();
  } else {
    if (dimension < 1)
      throw std::invalid_argument("config: dimension must be >= 1");
    if (noise_std < 0)
      throw std::invalid_argument("config: noise_std must be >= 0");
    if (!x0.empty() && static_cast<int>(x0.size()) != dimension)
      throw std::invalid_argument("config: x0 length must equal dimension");
  }
}

std::unique_ptr<StochasticObjective<double>> make_objective(
    const ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case Problem::quadratic:
      return quadratic_objective<double>(cfg.dimension, cfg.noise_std);
    case Problem::nonconvex:
      return nonconvex_objective<double>(cfg.dimension, cfg.noise_std);
    case Problem::lqg:
      return lqg_objective<double>(cfg.lqg);
  }
  throw std::invalid_argument("config: unknown problem");
}

namespace {

// Location of the positive minimizer of x^2 + cos(3x); its negative twin is
// symmetric and x = 0 is a local maximum, so this is the global minimum.
double nonconvex_coordinate_min() {
  double lo = 0.5, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double slope = 2 * mid - 3 * std::sin(3 * mid);
    (slope < 0 ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return x * x + std::cos(3 * x);
}

std::vector<std::string> default_metrics(Problem p) {
  if (p == Problem::lqg) return {"param_error", "cost_error"};
  return {"grad_norm"};
}

}  // namespace

std::vector<MetricDef<double>> make_metrics(const ExperimentConfig& cfg,
                                            const StochasticObjective<double>& obj,
                                            const std::vector<std::string>& names) {
  const std::vector<std::string> resolved =
      names.empty() ? default_metrics(cfg.problem) : names;
  std::vector<MetricDef<double>> out;
  for (const auto& name : resolved) {
    if (name == "grad_norm") {
      out.push_back(grad_norm_metric(obj));
    } else if (name == "param_error") {
      Vector<double> target;
      if (cfg.problem == Problem::quadratic) {
        target = Vector<double>::Zero(cfg.dimension);
      } else if (cfg.problem == Problem::lqg) {
        target = Vector<double>::Constant(1, riccati_optimal_gain(cfg.lqg));
      } else {
        throw UnsupportedMetric("param_error: no canonical target for " +
                                std::string(to_string(cfg.problem)));
      }
      out.push_back(param_error_metric(target));
    } else if (name == "cost_error") {
      double target = 0.0;
      if (cfg.problem == Problem::nonconvex)
        target = cfg.dimension * nonconvex_coordinate_min();
      else if (cfg.problem == Problem::lqg)
        target = expected_cost(cfg.lqg, riccati_optimal_gain(cfg.lqg));
      out.push_back(cost_error_metric(obj, target));
    } else {
      throw std::invalid_argument("config: unknown metric: " + name);
    }
  }
  return out;
}

Vector<double> trial_start(const ExperimentConfig& cfg, int trial) {
  if (cfg.problem == Problem::lqg) {
    SplitMix64 init(derive_seed(cfg.base_seed, role::init,
                                static_cast<std::uint64_t>(trial)));
    const double kstar = riccati_optimal_gain(cfg.lqg);
    return Vector<double>::Constant(1, perturbed_init(kstar, init));
  }
  if (!cfg.x0.empty()) {
    Vector<double> x(cfg.dimension);
    for (int i = 0; i < cfg.dimension; ++i) x[i] = cfg.x0[static_cast<std::size_t>(i)];
    return x;
  }
  return Vector<double>::Constant(cfg.dimension,
                                  1.0 / std::sqrt(static_cast<double>(cfg.dimension)));
}

AggregateResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto obj = make_objective(cfg);
  const auto metrics = make_metrics(cfg, *obj, cfg.metrics);
  const long rows = cfg.optimizer_T + 1;
  const auto n_metrics = static_cast<Eigen::Index>(metrics.size());
  const int n_methods = static_cast<int>(cfg.methods.size());
  const int n_slots = n_methods * cfg.trials;

  std::vector<Vector<double>> starts(static_cast<std::size_t>(cfg.trials));
  for (int tr = 0; tr < cfg.trials; ++tr)
    starts[static_cast<std::size_t>(tr)] = trial_start(cfg, tr);

  struct Slot {
    std::optional<TrialTrace<double>> trace;
    bool diverged = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n_slots));
  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= n_slots) return;
      const int mi = i / cfg.trials;
      const int tr = i % cfg.trials;
      const MethodSpec& m = cfg.methods[static_cast<std::size_t>(mi)];
      OptimizerConfig<double> oc;
      oc.T = cfg.optimizer_T;
      oc.eta = m.eta;
      oc.use_theorem_schedule = m.theorem_eta;
      oc.delta = m.delta;
      oc.estimator.kind = m.kind;
      oc.estimator.coefficient = m.coefficient;
      oc.x0 = starts[static_cast<std::size_t>(tr)];
      oc.seed = derive_seed(cfg.base_seed, fnv1a64(m.id.c_str()),
                            static_cast<std::uint64_t>(tr));
      try {
        slots[static_cast<std::size_t>(i)].trace = run(*obj, oc, metrics);
      } catch (const Diverged<double>&) {
        slots[static_cast<std::size_t>(i)].diverged = true;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int workers = std::min(cfg.parallel, n_slots);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  AggregateResult result;
  result.config = cfg;
  result.config_hash = fnv1a64(config_to_json(cfg).c_str());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  int completed_total = 0;
  for (int mi = 0; mi < n_methods; ++mi) {
    MethodAggregate agg;
    agg.id = cfg.methods[static_cast<std::size_t>(mi)].id;
    for (const auto& m : metrics) agg.metrics.push_back(m.name);
    agg.mean = Eigen::MatrixXd::Zero(rows, n_metrics);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(rows, n_metrics);
    agg.trial_initials = Eigen::MatrixXd::Constant(cfg.trials, n_metrics, nan);
    agg.trial_finals = Eigen::MatrixXd::Constant(cfg.trials, n_metrics, nan);
    int k = 0;
    // Streaming mean and second moment across trials, reduced in trial
    // order so the result is independent of worker scheduling.
    for (int tr = 0; tr < cfg.trials; ++tr) {
      const Slot& slot = slots[static_cast<std::size_t>(mi * cfg.trials + tr)];
      if (!slot.trace) {
        ++agg.diverged_trials;
        continue;
      }
      const auto& v = slot.trace->values;
      ++k;
      const Eigen::MatrixXd delta = v - agg.mean;
      agg.mean += delta / k;
      m2.array() += delta.array() * (v - agg.mean).array();
      agg.trial_initials.row(tr) = v.row(0);
      agg.trial_finals.row(tr) = v.row(rows - 1);
    }
    completed_total += k;
    if (k > 0) {
      agg.stddev = (m2 / k).cwiseMax(0.0).cwiseSqrt();
    } else {
      agg.mean = Eigen::MatrixXd::Constant(rows, n_metrics, nan);
      agg.stddev = Eigen::MatrixXd::Constant(rows, n_metrics, nan);
    }
    result.methods.push_back(std::move(agg));
  }
  if (completed_total == 0)
    throw std::runtime_error("experiment: every trial diverged");

  if (!cfg.output_dir.empty()) emit_outputs(result, cfg.output_dir);
  return result;
}

std::map<std::string, std::pair<double, double>> sweep_tuning(
    const ExperimentConfig& cfg, const std::vector<double>& eta_grid,
    const std::vector<double>& delta_grid) {
  if (eta_grid.empty() || delta_grid.empty())
    throw std::invalid_argument("sweep_tuning: grids must be nonempty");
  std::vector<double> etas = eta_grid, deltas = delta_grid;
  std::sort(etas.begin(), etas.end());
  std::sort(deltas.begin(), deltas.end());

  ExperimentConfig base = cfg;
  base.trials = 3;
  base.output_dir.clear();
  base.metrics = {"cost_error"};

  const double inf = std::numeric_limits<double>::infinity();
  std::map<std::string, std::pair<double, double>> best;
  std::map<std::string, double> best_score;
  for (const auto& m : cfg.methods) best_score[m.id] = inf;

  for (const double eta : etas) {
    for (const double delta : deltas) {
      ExperimentConfig cell = base;
      for (auto& m : cell.methods) {
        m.eta = eta;
        m.theorem_eta = false;
        m.delta = delta;
      }
      AggregateResult r;
      try {
        r = run_experiment(cell);
      } catch (const std::runtime_error&) {
        continue;  // every trial diverged in this cell
      }
      for (const auto& agg : r.methods) {
        const double score = agg.mean(agg.mean.rows() - 1, 0);
        if (std::isnan(score)) continue;
        // Strict improvement plus ascending iteration order implements the
        // smaller-eta, then smaller-delta tie-break.
        if (score < best_score[agg.id]) {
          best_score[agg.id] = score;
          best[agg.id] = {eta, delta};
        }
      }
    }
  }
  for (const auto& m : cfg.methods)
    if (best_score[m.id] == inf)
      throw std::runtime_error("sweep_tuning: all cells diverged for " + m.id);
  return best;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["problem"] = to_string(cfg.problem);
  if (cfg.problem == Problem::lqg) {
    j["lqg"] = {{"A", cfg.lqg.A},
                {"B", cfg.lqg.B},
                {"Q", cfg.lqg.Q},
                {"R", cfg.lqg.R},
                {"gamma", cfg.lqg.gamma},
                {"noise_std", cfg.lqg.noise_std},
                {"horizon", cfg.lqg.horizon},
                {"x0_state", cfg.lqg.x0_state}};
  } else {
    j["dimension"] = cfg.dimension;
    j["noise_std"] = cfg.noise_std;
    if (!cfg.x0.empty()) j["x0"] = cfg.x0;
  }
  j["methods"] = json::array();
  for (const auto& m : cfg.methods) {
    json jm;
    jm["id"] = m.id;
    jm["kind"] = to_string(m.kind);
    if (m.theorem_eta)
      jm["eta"] = "theorem";
    else
      jm["eta"] = m.eta;
    jm["delta"] = m.delta;
    if (m.coefficient) jm["coefficient"] = *m.coefficient;
    j["methods"].push_back(jm);
  }
  j["trials"] = cfg.trials;
  j["optimizer_T"] = cfg.optimizer_T;
  j["base_seed"] = cfg.base_seed;
  j["output_dir"] = cfg.output_dir;
  j["metrics"] = cfg.metrics;
  j["parallel"] = cfg.parallel;
  return j;
}

std::string csv_for(const MethodAggregate& agg) {
  std::string out = "t,metric,mean,std\n";
  for (Eigen::Index t = 0; t < agg.mean.rows(); ++t) {
    for (std::size_t m = 0; m < agg.metrics.size(); ++m) {
      const auto col = static_cast<Eigen::Index>(m);
      out += std::to_string(t);
      out += ',';
      out += agg.metrics[m];
      out += ',';
      out += fmt17(agg.mean(t, col));
      out += ',';
      out += fmt17(agg.stddev(t, col));
      out += '\n';
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

// Log-scale line chart with a shaded +-std band per method.
std::string svg_for(const AggregateResult& result, const std::string& metric) {
  const double width = 720, height = 480;
  const double left = 70, right = width - 170, top = 36, bottom = height - 56;

  struct Series {
    std::string id;
    const Eigen::MatrixXd* mean;
    const Eigen::MatrixXd* stddev;
    Eigen::Index col;
  };
  std::vector<Series> series;
  long rows = 0;
  for (const auto& agg : result.methods) {
    for (std::size_t m = 0; m < agg.metrics.size(); ++m)
      if (agg.metrics[m] == metric) {
        series.push_back(
            {agg.id, &agg.mean, &agg.stddev, static_cast<Eigen::Index>(m)});
        rows = std::max<long>(rows, agg.mean.rows());
      }
  }

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
      "viewBox=\"0 0 720 480\">\n<rect width=\"720\" height=\"480\" "
      "fill=\"white\"/>\n";
  svg += "<text x=\"360\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + metric + " (mean ± std across trials)</text>\n";

  if (series.empty() || rows < 2) {
    svg += "<text x=\"360\" y=\"240\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">metric not recorded</text>\n";
    svg += "</svg>\n";
    return svg;
  }

  double vmin = std::numeric_limits<double>::infinity(), vmax = 0;
  for (const auto& s : series)
    for (Eigen::Index t = 0; t < s.mean->rows(); ++t) {
      const double v = (*s.mean)(t, s.col);
      if (std::isfinite(v) && v > 0) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    }
  if (!std::isfinite(vmin) || vmax <= 0) {
    vmin = 1e-3;
    vmax = 1.0;
  }
  const double lo = std::floor(std::log10(vmin / 1.2));
  const double hi = std::ceil(std::log10(vmax * 1.2));
  const double span = std::max(hi - lo, 1.0);

  const auto X = [&](double t) {
    return left + (right - left) * t / static_cast<double>(rows - 1);
  };
  const auto Y = [&](double v) {
    const double c = std::clamp(std::log10(std::max(v, 1e-300)), lo, hi);
    return bottom - (bottom - top) * (c - lo) / span;
  };

  // Axes and decade gridlines.
  for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
    const double y = Y(std::pow(10.0, e));
    svg += "<line x1=\"" + fmt_coord(left) + "\" y1=\"" + fmt_coord(y) +
           "\" x2=\"" + fmt_coord(right) + "\" y2=\"" + fmt_coord(y) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt_coord(left - 8) + "\" y=\"" + fmt_coord(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" +
           std::to_string(e) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = (rows - 1) * i / 4.0;
    svg += "<text x=\"" + fmt_coord(X(t)) + "\" y=\"" + fmt_coord(bottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           std::to_string(static_cast<long>(t)) + "</text>\n";
  }
  svg += "<line x1=\"" + fmt_coord(left) + "\" y1=\"" + fmt_coord(bottom) +
         "\" x2=\"" + fmt_coord(right) + "\" y2=\"" + fmt_coord(bottom) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt_coord(left) + "\" y1=\"" + fmt_coord(top) +
         "\" x2=\"" + fmt_coord(left) + "\" y2=\"" + fmt_coord(bottom) +
         "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fmt_coord((left + right) / 2) + "\" y=\"" +
         fmt_coord(height - 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">iteration t</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 6];
    // Band: upper edge forward, lower edge reversed.
    std::string band = "<polygon fill=\"" + std::string(color) +
                       "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (Eigen::Index t = 0; t < s.mean->rows(); ++t)
      band += fmt_coord(X(static_cast<double>(t))) + "," +
              fmt_coord(Y((*s.mean)(t, s.col) + (*s.stddev)(t, s.col))) + " ";
    for (Eigen::Index t = s.mean->rows() - 1; t >= 0; --t)
      band += fmt_coord(X(static_cast<double>(t))) + "," +
              fmt_coord(Y(std::max((*s.mean)(t, s.col) - (*s.stddev)(t, s.col),
                                   1e-300))) +
              " ";
    band += "\"/>\n";
    svg += band;
    std::string line = "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                       "\" stroke-width=\"1.6\" points=\"";
    for (Eigen::Index t = 0; t < s.mean->rows(); ++t)
      line += fmt_coord(X(static_cast<double>(t))) + "," +
              fmt_coord(Y((*s.mean)(t, s.col))) + " ";
    line += "\"/>\n";
    svg += line;
    const double ly = top + 18 * static_cast<double>(si);
    svg += "<line x1=\"" + fmt_coord(right + 12) + "\" y1=\"" + fmt_coord(ly) +
           "\" x2=\"" + fmt_coord(right + 36) + "\" y2=\"" + fmt_coord(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_coord(right + 42) + "\" y=\"" + fmt_coord(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + s.id + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

std::vector<std::string> emit_outputs(const AggregateResult& result,
                                      const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> written;

  for (const auto& agg : result.methods) {
    const fs::path p = fs::path(dir) / ("trace_" + agg.id + ".csv");
    write_file(p, csv_for(agg));
    written.push_back(p.string());
  }

  json j;
  j["config"] = config_json(result.config);
  char hash_buf[24];
  std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                static_cast<unsigned long long>(result.config_hash));
  j["provenance"]["config_hash"] = hash_buf;
  j["provenance"]["generator_id"] = kGeneratorId;
  j["provenance"]["build_id"] = kBuildId;
  j["provenance"]["seed_scheme"] =
      "streams keyed by (base_seed, method_id, trial_index, role)";
  json div;
  for (const auto& agg : result.methods) div[agg.id] = agg.diverged_trials;
  j["provenance"]["diverged_trials"] = div;
  const fs::path jp = fs::path(dir) / "experiment.json";
  write_file(jp, j.dump(2) + "\n");
  written.push_back(jp.string());

  for (const char* metric : {"param_error", "cost_error"}) {
    const fs::path p = fs::path(dir) / ("fig_" + std::string(metric) + ".svg");
    write_file(p, svg_for(result, metric));
    written.push_back(p.string());
  }
  return written;
}

TrialTrace<double> interactive_session(const ExperimentConfig& cfg,
                                       std::istream& in, std::ostream& out) {
  cfg.validate();
  if (cfg.methods.size() != 1)
    throw std::invalid_argument("interactive: exactly one method required");
  const MethodSpec& m = cfg.methods.front();
  if (m.kind != EstimatorKind::psgd_u)
    throw std::invalid_argument("interactive: method must be psgd_u");

  const auto obj = make_objective(cfg);
  const auto metrics = make_metrics(cfg, *obj, cfg.metrics);

  OptimizerConfig<double> oc;
  oc.T = cfg.optimizer_T;
  oc.eta = m.eta;
  oc.use_theorem_schedule = m.theorem_eta;
  oc.delta = m.delta;
  oc.estimator.kind = m.kind;
  oc.estimator.coefficient = m.coefficient;
  oc.x0 = trial_start(cfg, 0);
  oc.seed = derive_seed(cfg.base_seed, fnv1a64(m.id.c_str()), 0);
  oc.record_points = true;

  InteractiveComparator<double> oracle(in, out);
  TrialTrace<double> trace = run_with_oracle(oracle, oc, metrics);

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    std::string csv = "t,metric,value\n";
    for (long t = 0; t < trace.rows; ++t)
      for (std::size_t mi = 0; mi < trace.metric_names.size(); ++mi)
        csv += std::to_string(t) + "," + trace.metric_names[mi] + "," +
               fmt17(trace.values(t, static_cast<Eigen::Index>(mi))) + "\n";
    write_file(fs::path(cfg.output_dir) / "interactive_trace.csv", csv);

    std::string log;
    for (const auto& line : oracle.response_log()) log += line + "\n";
    write_file(fs::path(cfg.output_dir) / "interactive_log.txt", log);

    json j;
    j["config"] = config_json(cfg);
    j["aborted"] = trace.aborted;
    j["rows"] = trace.rows;
    write_file(fs::path(cfg.output_dir) / "interactive.json", j.dump(2) + "\n");
  }
  return trace;
}

namespace {

[[noreturn]] void reject_key(const std::string& where, const std::string& key) {
  throw std::invalid_argument("config: unknown key in " + where + ": " + key);
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) reject_key(where, item.key());
}

EstimatorKind parse_kind(const std::string& s) {
  if (s == "psgd_u") return EstimatorKind::psgd_u;
  if (s == "psgd_g") return EstimatorKind::psgd_g;
  if (s == "zo_two_point" || s == "zo") return EstimatorKind::zo_two_point;
  throw std::invalid_argument("config: unknown estimator kind: " + s);
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: root must be an object");
  check_keys(j, "root",
             {"problem", "dimension", "noise_std", "x0", "lqg", "methods",
              "trials", "optimizer_T", "base_seed", "output_dir", "metrics",
              "parallel"});

  ExperimentConfig cfg;
  const std::string problem = j.at("problem").get<std::string>();
  if (problem == "quadratic")
    cfg.problem = Problem::quadratic;
  else if (problem == "nonconvex")
    cfg.problem = Problem::nonconvex;
  else if (problem == "lqg")
    cfg.problem = Problem::lqg;
  else
    throw std::invalid_argument("config: unknown problem: " + problem);

  if (j.contains("dimension")) cfg.dimension = j["dimension"].get<int>();
  if (j.contains("noise_std")) cfg.noise_std = j["noise_std"].get<double>();
  if (j.contains("x0")) cfg.x0 = j["x0"].get<std::vector<double>>();
  if (j.contains("lqg")) {
    const json& l = j["lqg"];
    check_keys(l, "lqg",
               {"A", "B", "Q", "R", "gamma", "noise_std", "horizon", "x0_state"});
    if (l.contains("A")) cfg.lqg.A = l["A"].get<double>();
    if (l.contains("B")) cfg.lqg.B = l["B"].get<double>();
    if (l.contains("Q")) cfg.lqg.Q = l["Q"].get<double>();
    if (l.contains("R")) cfg.lqg.R = l["R"].get<double>();
    if (l.contains("gamma")) cfg.lqg.gamma = l["gamma"].get<double>();
    if (l.contains("noise_std")) cfg.lqg.noise_std = l["noise_std"].get<double>();
    if (l.contains("horizon")) cfg.lqg.horizon = l["horizon"].get<int>();
    if (l.contains("x0_state")) cfg.lqg.x0_state = l["x0_state"].get<double>();
  }

  if (!j.contains("methods") || !j["methods"].is_array() || j["methods"].empty())
    throw std::invalid_argument("config: methods must be a nonempty array");
  for (const json& jm : j["methods"]) {
    check_keys(jm, "method",
               {"id", "kind", "eta", "delta", "coefficient", "theorem_eta"});
    MethodSpec m;
    m.id = jm.at("id").get<std::string>();
    if (jm.contains("kind"))
      m.kind = parse_kind(jm["kind"].get<std::string>());
    else
      m.kind = parse_kind(m.id);  // id doubling as the kind name
    if (jm.contains("eta")) {
      if (jm["eta"].is_string()) {
        if (jm["eta"].get<std::string>() != "theorem")
          throw std::invalid_argument("config: eta must be a number or \"theorem\"");
        m.theorem_eta = true;
      } else {
        m.eta = jm["eta"].get<double>();
      }
    }
    if (jm.contains("theorem_eta")) m.theorem_eta = jm["theorem_eta"].get<bool>();
    if (jm.contains("delta")) m.delta = jm["delta"].get<double>();
    if (jm.contains("coefficient")) m.coefficient = jm["coefficient"].get<double>();
    cfg.methods.push_back(std::move(m));
  }

  if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
  if (j.contains("optimizer_T")) cfg.optimizer_T = j["optimizer_T"].get<long>();
  if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("metrics"))
    cfg.metrics = j["metrics"].get<std::vector<std::string>>();
  if (j.contains("parallel")) cfg.parallel = j["parallel"].get<int>();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return config_json(cfg).dump(2) + "\n";
}

}  // namespace prefopt
