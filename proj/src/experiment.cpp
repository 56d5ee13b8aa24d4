// Copyright 2025 The dperm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dperm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dperm/bounds.hpp"
#include "dperm/optimize.hpp"
#include "dperm/parallel.hpp"
#include "dperm/privacy.hpp"

namespace dperm {

using nlohmann::json;

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::kAccuracyVsEpsilon: return "accuracy_vs_epsilon";
    case PlotKind::kConvergenceCurves: return "convergence_curves";
    case PlotKind::kRiskVsN: return "risk_vs_n";
    case PlotKind::kRiskVsP: return "risk_vs_p";
  }
  return "?";
}

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "accuracy_vs_epsilon") return PlotKind::kAccuracyVsEpsilon;
  if (s == "convergence_curves") return PlotKind::kConvergenceCurves;
  if (s == "risk_vs_n") return PlotKind::kRiskVsN;
  if (s == "risk_vs_p") return PlotKind::kRiskVsP;
  throw ConfigError("unknown plot kind '" + s + "'");
}

void ExperimentSpec::validate() const {
  if (epsilons.empty() && base_config.optimizer != OptimizerKind::kNonPrivateGd) {
    throw ConfigError("ExperimentSpec: epsilon grid is empty");
  }
  for (const double eps : epsilons) {
    if (!(eps > 0.0)) throw ConfigError("ExperimentSpec: epsilon values must be positive");
  }
  if (seeds.empty()) throw ConfigError("ExperimentSpec: seed list is empty");
  if (optimizers.empty()) throw ConfigError("ExperimentSpec: optimizer list is empty");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("ExperimentSpec: test fraction must lie in (0,1)");
  }
  if (output_dir.empty()) throw ConfigError("ExperimentSpec: output_dir is required");
}

namespace {

SyntheticSpec synthetic_from_json(const json& j) {
  SyntheticSpec s;
  s.kind = synthetic_kind_from_string(j.at("kind").get<std::string>());
  s.n = j.value("n", static_cast<Eigen::Index>(100));
  s.p = j.value("p", static_cast<Eigen::Index>(10));
  s.seed = j.value("seed", uint64_t{0});
  s.feature_radius = j.value("feature_radius", 1.0);
  s.theta_scale = j.value("theta_scale", 1.0);
  s.label_noise = j.value("label_noise", 0.1);
  s.margin = j.value("margin", 0.5);
  s.flip_probability = j.value("flip_probability", 0.1);
  return s;
}

RunConfig run_config_from_json(const json& j) {
  // Reuses the flat config parser so the JSON "run" block and config files
  // accept exactly the same keys.
  std::string text;
  for (const auto& [key, value] : j.items()) {
    text += key;
    text += " = ";
    if (value.is_string()) {
      text += value.get<std::string>();
    } else {
      text += value.dump();
    }
    text += "\n";
  }
  return parse_run_config(text);
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment spec: invalid JSON: ") + e.what());
  }
  ExperimentSpec spec;
  const json& ds = j.at("dataset");
  const std::string kind = ds.at("kind").get<std::string>();
  if (kind == "csv" || kind == "cache") {
    spec.source.kind =
        kind == "csv" ? DatasetSource::Kind::kCsv : DatasetSource::Kind::kCache;
    spec.source.path = ds.at("path").get<std::string>();
    if (kind == "csv") {
      spec.source.schema.label_column = ds.at("label_column").get<std::string>();
      spec.source.schema.has_header = ds.value("has_header", true);
      const std::string delim = ds.value("delimiter", std::string(","));
      if (delim.size() != 1) throw ConfigError("experiment spec: delimiter must be one char");
      spec.source.schema.delimiter = delim[0];
      spec.source.schema.one_vs_rest = ds.value("one_vs_rest", false);
      spec.source.schema.task = ds.value("task", std::string("classification")) == "regression"
                                    ? Task::kRegression
                                    : Task::kClassification;
    }
  } else if (kind == "synthetic") {
    spec.source.kind = DatasetSource::Kind::kSynthetic;
    spec.source.synthetic = synthetic_from_json(ds.at("synthetic"));
  } else {
    throw ConfigError("experiment spec: unknown dataset kind '" + kind + "'");
  }

  if (j.contains("split")) {
    spec.test_fraction = j["split"].value("test_fraction", 0.3);
    spec.split_seed = j["split"].value("seed", uint64_t{7});
  }

  const json& grid = j.at("grid");
  spec.epsilons = grid.value("epsilons", std::vector<double>{});
  if (grid.contains("train_sizes")) {
    for (const auto& v : grid["train_sizes"]) {
      spec.train_sizes.push_back(v.get<Eigen::Index>());
    }
  }
  if (grid.contains("pad_dims")) {
    for (const auto& v : grid["pad_dims"]) spec.pad_dims.push_back(v.get<Eigen::Index>());
  }
  if (grid.contains("seeds")) {
    if (grid["seeds"].is_array()) {
      for (const auto& v : grid["seeds"]) spec.seeds.push_back(v.get<uint64_t>());
    } else {
      const uint64_t count = grid["seeds"].at("count").get<uint64_t>();
      const uint64_t base = grid["seeds"].value("base", uint64_t{0});
      for (uint64_t s = 0; s < count; ++s) spec.seeds.push_back(base + s);
    }
  }
  if (grid.contains("optimizers")) {
    for (const auto& v : grid["optimizers"]) {
      spec.optimizers.push_back(optimizer_from_string(v.get<std::string>()));
    }
  }

  if (j.contains("run")) spec.base_config = run_config_from_json(j["run"]);
  spec.output_dir = j.value("output_dir", std::string());
  if (j.contains("emit")) {
    for (const auto& v : j["emit"]) {
      spec.emit.push_back(plot_kind_from_string(v.get<std::string>()));
    }
  }
  spec.overlay_zeta = j.value("overlay_zeta", 0.05);
  spec.max_workers = j.value("max_workers", 0u);
  spec.measure_population = j.value("measure_population", false);
  spec.population_pool = j.value("population_pool", static_cast<Eigen::Index>(100000));
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment spec: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str());
}

namespace {

json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

double classification_accuracy(const ParamVector& theta, const Dataset& test) {
  Eigen::Index correct = 0;
  const Eigen::VectorXd scores = test.features * theta;
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const double predicted = scores[i] >= 0.0 ? 1.0 : -1.0;
    if (predicted == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace

std::string RunReport::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["dataset"] = dataset;
  j["optimizer"] = dperm::to_string(optimizer);
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["n_train"] = n_train;
  j["n_test"] = n_test;
  j["p"] = p;
  j["seed"] = seed;
  j["plan"] = {{"sigma", sigma},
               {"iterations", iterations},
               {"schedule", schedule},
               {"kappa", optional_number(kappa)},
               {"eta0", eta0},
               {"lipschitz_used", lipschitz_used},
               {"sigma_constant_c", sigma_constant_c}};
  j["metrics"] = {{"final_risk", optional_number(final_risk)},
                  {"excess_empirical_risk", optional_number(excess_empirical_risk)},
                  {"oracle_risk", optional_number(oracle_risk)},
                  {"test_accuracy", optional_number(test_accuracy)},
                  {"excess_population_risk", optional_number(excess_population_risk)},
                  {"final_grad_norm", optional_number(final_grad_norm)},
                  {"degenerate_steps", degenerate_steps}};
  j["bounds"] = {{"opt_error_smooth", optional_number(bound_opt_smooth)},
                 {"opt_error_hoelder", optional_number(bound_opt_hoelder)},
                 {"excess_risk", optional_number(bound_excess_risk)}};
  if (risk_curve) j["risk_curve"] = *risk_curve;
  j["status"] = status;
  j["wall_clock_ms"] = wall_clock_ms;
  return j.dump();
}

RunReport execute_run(const Dataset& train_data, const Dataset* test_data,
                      const RunConfig& config,
                      const std::optional<SyntheticSpec>& synthetic_info, double overlay_zeta,
                      bool want_curve, bool measure_population, Eigen::Index population_pool,
                      TrainTrace* trace_out) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.dataset = train_data.name;
  report.optimizer = config.optimizer;
  report.seed = config.seed;
  report.n_train = train_data.size();
  report.n_test = test_data ? test_data->size() : 0;
  report.p = train_data.dim();
  if (config.optimizer != OptimizerKind::kNonPrivateGd) {
    report.epsilon = config.epsilon.value_or(0.0);
    report.delta = config.delta.value_or(0.0);
  }

  try {
    if (!config.projection_radius) {
      throw ConfigError("execute_run: projection.radius is required to derive constants");
    }
    const LossModel model(config.loss);
    AssumptionConstants constants =
        model.derive_constants(train_data, *config.projection_radius);
    constants.apply(config.constants_override);
    const NoisePlan plan = build_noise_plan(config, constants, train_data.size());
    report.sigma = plan.sigma;
    report.iterations = plan.iterations;
    report.schedule = to_string(plan.schedule.kind);
    report.kappa = plan.schedule.kappa;
    report.eta0 = learning_rate(plan.schedule, 0, constants);
    report.lipschitz_used = plan.lipschitz_used;
    report.sigma_constant_c = plan.sigma_constant_c;

    const ParamVector theta0 = ParamVector::Zero(train_data.dim());
    const TrainTrace trace = train(config, plan, model, train_data, theta0, constants);
    if (trace_out) *trace_out = trace;

    report.final_risk = trace.entries.back().empirical_risk;
    ParamVector grad(train_data.dim());
    model.empirical_risk_and_gradient(trace.final_params, train_data, grad);
    report.final_grad_norm = grad.norm();
    for (const TraceEntry& e : trace.entries) {
      if (e.degenerate_step) ++report.degenerate_steps;
    }
    if (want_curve) {
      std::vector<double> curve;
      curve.reserve(trace.entries.size());
      for (const TraceEntry& e : trace.entries) curve.push_back(e.empirical_risk);
      report.risk_curve = std::move(curve);
    }

    try {
      const Minimizer oracle = solve_nonprivate(
          model, train_data, config.oracle_tolerance, config.oracle_max_iterations,
          config.projection_enabled ? config.projection_radius : std::nullopt);
      report.oracle_risk = oracle.risk;
      report.excess_empirical_risk = *report.final_risk - oracle.risk;
    } catch (const OracleError&) {
      // Reference solve is best-effort; the run itself still counts.
    }

    if (test_data && train_data.task == Task::kClassification) {
      report.test_accuracy = classification_accuracy(trace.final_params, *test_data);
    }
    if (synthetic_info) {
      SyntheticSpec pop_spec = *synthetic_info;
      pop_spec.n = train_data.size();
      const bool closed_form = pop_spec.kind != SyntheticKind::kLogisticSeparable &&
                               model.family() == LossFamily::kLeastSquares &&
                               model.lambda() == 0.0;
      if (closed_form || measure_population) {
        report.excess_population_risk =
            population_excess_risk(pop_spec, model, trace.final_params, population_pool);
      }
    }

    if (config.optimizer != OptimizerKind::kNonPrivateGd) {
      BoundInput input;
      input.n = train_data.size();
      input.p = train_data.dim();
      input.epsilon = report.epsilon;
      input.delta = report.delta;
      input.zeta = overlay_zeta;
      input.iterations = plan.iterations;
      input.constants = constants;
      input.sigma_constant_c = config.sigma_constant_c;
      try {
        report.bound_opt_smooth = opt_error_bound_smooth(input);
      } catch (const ConfigError&) {
      }
      try {
        report.bound_opt_hoelder = opt_error_bound_hoelder(input);
      } catch (const ConfigError&) {
      }
      try {
        const ExcessRiskRegime regime =
            config.optimizer == OptimizerKind::kMngp
                ? ExcessRiskRegime::kHoelderNormalized
                : (constants.smoothness ? ExcessRiskRegime::kSmoothConstStep
                                        : ExcessRiskRegime::kHoelderDecaying);
        report.bound_excess_risk = excess_risk_bound(regime, input);
      } catch (const ConfigError&) {
      }
    }
  } catch (const Error& e) {
    report.status = e.what();
  }

  const auto end = std::chrono::steady_clock::now();
  report.wall_clock_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(end - start)
          .count();
  return report;
}

bool report_key_less(const RunReport& a, const RunReport& b) {
  const auto key = [](const RunReport& r) {
    return std::make_tuple(r.dataset, to_string(r.optimizer), r.epsilon, r.n_train, r.p,
                           r.seed);
  };
  return key(a) < key(b);
}

std::string aggregate_csv(std::vector<RunReport> reports) {
  std::sort(reports.begin(), reports.end(), report_key_less);
  std::string out =
      "dataset,optimizer,epsilon,n,p,seed,sigma,iterations,final_risk,"
      "excess_empirical_risk,test_accuracy,excess_population_risk,status\n";
  const auto opt_cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const RunReport& r : reports) {
    out += r.dataset + ',' + to_string(r.optimizer) + ',' + format_double(r.epsilon) + ',' +
           std::to_string(r.n_train) + ',' + std::to_string(r.p) + ',' +
           std::to_string(r.seed) + ',' + format_double(r.sigma) + ',' +
           std::to_string(r.iterations) + ',' + opt_cell(r.final_risk) + ',' +
           opt_cell(r.excess_empirical_risk) + ',' + opt_cell(r.test_accuracy) + ',' +
           opt_cell(r.excess_population_risk) + ',';
    // Statuses may contain commas; quote to keep the CSV parseable.
    if (r.status.find(',') == std::string::npos) {
      out += r.status;
    } else {
      std::string quoted = r.status;
      std::string::size_type pos = 0;
      while ((pos = quoted.find('"', pos)) != std::string::npos) {
        quoted.replace(pos, 1, "\"\"");
        pos += 2;
      }
      out += '"' + quoted + '"';
    }
    out += '\n';
  }
  return out;
}

namespace {

struct GridCell {
  Eigen::Index n = 0;  // 0: native size
  Eigen::Index p = 0;  // 0: native dimension
  Dataset train;
  Dataset test;
};

Eigen::Index synthetic_test_count(Eigen::Index n_train, double test_fraction) {
  const double raw = test_fraction / (1.0 - test_fraction) * static_cast<double>(n_train);
  return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::llround(raw)), 100, 20000);
}

}  // namespace

std::vector<RunReport> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::filesystem::create_directories(spec.output_dir);

  // Materialize the per-(n, p) train/test pairs up front; every run in a cell
  // shares them.
  std::vector<Eigen::Index> sizes = spec.train_sizes.empty()
                                        ? std::vector<Eigen::Index>{0}
                                        : spec.train_sizes;
  std::vector<Eigen::Index> dims =
      spec.pad_dims.empty() ? std::vector<Eigen::Index>{0} : spec.pad_dims;

  std::optional<Dataset> base_train;
  std::optional<Dataset> base_test;
  if (spec.source.kind != DatasetSource::Kind::kSynthetic) {
    Dataset full = spec.source.kind == DatasetSource::Kind::kCsv
                       ? ingest_csv(spec.source.path, spec.source.schema)
                       : load_dataset_cache(spec.source.path);
    auto [train_split, test_split] =
        train_test_split(full, spec.test_fraction, spec.split_seed);
    base_train = std::move(train_split);
    base_test = std::move(test_split);
  }

  std::vector<GridCell> cells;
  for (const Eigen::Index n : sizes) {
    for (const Eigen::Index p : dims) {
      GridCell cell;
      cell.n = n;
      cell.p = p;
      if (spec.source.kind == DatasetSource::Kind::kSynthetic) {
        SyntheticSpec syn = spec.source.synthetic;
        if (n > 0) syn.n = n;
        cell.train = generate_synthetic(syn);
        SyntheticSpec test_syn = syn;
        test_syn.n = synthetic_test_count(syn.n, spec.test_fraction);
        cell.test = generate_synthetic_population(test_syn, test_syn.n);
      } else {
        cell.train = n > 0 ? subsample(*base_train, n, spec.split_seed) : *base_train;
        cell.test = *base_test;
      }
      if (p > 0) {
        cell.train = pad_dimensions(cell.train, p);
        cell.test = pad_dimensions(cell.test, p);
      }
      cells.push_back(std::move(cell));
    }
  }

  struct PendingRun {
    std::size_t cell = 0;
    double epsilon = 0.0;
    OptimizerKind optimizer = OptimizerKind::kTgp;
    uint64_t seed = 0;
  };
  std::vector<PendingRun> pending;
  const std::vector<double> epsilons =
      spec.epsilons.empty() ? std::vector<double>{1.0} : spec.epsilons;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (const double eps : epsilons) {
      for (const OptimizerKind opt : spec.optimizers) {
        for (const uint64_t seed : spec.seeds) {
          pending.push_back({c, eps, opt, seed});
        }
      }
    }
  }

  const bool want_curves =
      std::find(spec.emit.begin(), spec.emit.end(), PlotKind::kConvergenceCurves) !=
      spec.emit.end();
  std::vector<RunReport> reports(pending.size());
  parallel_for(pending.size(), spec.max_workers, [&](std::size_t i) {
    const PendingRun& run = pending[i];
    const GridCell& cell = cells[run.cell];
    RunConfig config = spec.base_config;
    config.seed = run.seed;
    config.optimizer = run.optimizer;
    config.epsilon = run.epsilon;
    config.delta = 1.0 / static_cast<double>(cell.train.size());
    std::optional<SyntheticSpec> syn;
    if (spec.source.kind == DatasetSource::Kind::kSynthetic) {
      syn = spec.source.synthetic;
      if (cell.n > 0) syn->n = cell.n;
    }
    reports[i] = execute_run(cell.train, &cell.test, config, syn, spec.overlay_zeta,
                             want_curves, spec.measure_population, spec.population_pool);
  });

  std::sort(reports.begin(), reports.end(), report_key_less);

  std::string jsonl;
  for (const RunReport& r : reports) {
    jsonl += r.to_json();
    jsonl += '\n';
  }
  write_file_atomic(spec.output_dir + "/reports.jsonl", jsonl);
  write_file_atomic(spec.output_dir + "/aggregate.csv", aggregate_csv(reports));
  for (const PlotKind kind : spec.emit) {
    emit_plot_data(reports, kind, spec.output_dir);
  }
  return reports;
}

namespace {

struct Series {
  std::map<double, std::vector<double>> by_x;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw DataError(message);
}

std::string epsilon_tag(double eps) {
  std::string tag = format_double(eps);
  for (char& ch : tag) {
    if (ch == '.' || ch == '+' || ch == '-') ch = '_';
  }
  return tag;
}

std::string write_series_csv(const std::string& path, const std::string& x_name,
                             const Series& series) {
  std::string out = x_name + ",mean,min,max\n";
  for (const auto& [x, values] : series.by_x) {
    double sum = 0.0;
    double mn = values.front();
    double mx = values.front();
    for (const double v : values) {
      sum += v;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    out += format_double(x) + ',' + format_double(sum / static_cast<double>(values.size())) +
           ',' + format_double(mn) + ',' + format_double(mx) + '\n';
  }
  write_file_atomic(path, out);
  return path;
}

}  // namespace

std::vector<std::string> emit_plot_data(const std::vector<RunReport>& reports, PlotKind kind,
                                        const std::string& out_dir) {
  std::vector<const RunReport*> ok;
  for (const RunReport& r : reports) {
    if (r.ok()) ok.push_back(&r);
  }
  require(!ok.empty(), "emit_plot_data: no successful reports");
  std::filesystem::create_directories(out_dir);

  const auto all_same = [&](auto getter) {
    for (const RunReport* r : ok) {
      if (getter(*r) != getter(*ok.front())) return false;
    }
    return true;
  };
  require(all_same([](const RunReport& r) { return r.dataset; }),
          "emit_plot_data: reports mix datasets");

  std::vector<std::string> files;
  switch (kind) {
    case PlotKind::kAccuracyVsEpsilon: {
      require(all_same([](const RunReport& r) { return r.n_train; }) &&
                  all_same([](const RunReport& r) { return r.p; }),
              "emit_plot_data: accuracy curves need homogeneous (n, p)");
      std::map<OptimizerKind, Series> per_optimizer;
      for (const RunReport* r : ok) {
        require(r->test_accuracy.has_value(), "emit_plot_data: report lacks accuracy");
        per_optimizer[r->optimizer].by_x[r->epsilon].push_back(*r->test_accuracy);
      }
      for (const auto& [opt, series] : per_optimizer) {
        files.push_back(write_series_csv(
            out_dir + "/accuracy_vs_epsilon_" + to_string(opt) + ".csv", "epsilon", series));
      }
      break;
    }
    case PlotKind::kConvergenceCurves: {
      require(all_same([](const RunReport& r) { return r.n_train; }) &&
                  all_same([](const RunReport& r) { return r.p; }),
              "emit_plot_data: convergence curves need homogeneous (n, p)");
      std::map<std::pair<OptimizerKind, double>, std::vector<const RunReport*>> groups;
      for (const RunReport* r : ok) {
        require(r->risk_curve.has_value(), "emit_plot_data: report lacks a risk curve");
        groups[{r->optimizer, r->epsilon}].push_back(r);
      }
      for (const auto& [key, group] : groups) {
        const std::size_t len = group.front()->risk_curve->size();
        for (const RunReport* r : group) {
          require(r->risk_curve->size() == len,
                  "emit_plot_data: convergence curves differ in length");
        }
        std::string out = "t,mean_risk,min_risk,max_risk\n";
        for (std::size_t t = 0; t < len; ++t) {
          double sum = 0.0;
          double mn = (*group.front()->risk_curve)[t];
          double mx = mn;
          for (const RunReport* r : group) {
            const double v = (*r->risk_curve)[t];
            sum += v;
            mn = std::min(mn, v);
            mx = std::max(mx, v);
          }
          out += std::to_string(t) + ',' +
                 format_double(sum / static_cast<double>(group.size())) + ',' +
                 format_double(mn) + ',' + format_double(mx) + '\n';
        }
        const std::string path = out_dir + "/convergence_" + to_string(key.first) + "_eps" +
                                 epsilon_tag(key.second) + ".csv";
        write_file_atomic(path, out);
        files.push_back(path);
      }
      break;
    }
    case PlotKind::kRiskVsN: {
      require(all_same([](const RunReport& r) { return r.p; }) &&
                  all_same([](const RunReport& r) { return r.epsilon; }),
              "emit_plot_data: risk-vs-n needs homogeneous (p, epsilon)");
      std::map<OptimizerKind, Series> per_optimizer;
      for (const RunReport* r : ok) {
        require(r->excess_empirical_risk.has_value(),
                "emit_plot_data: report lacks excess empirical risk");
        per_optimizer[r->optimizer]
            .by_x[static_cast<double>(r->n_train)]
            .push_back(*r->excess_empirical_risk);
      }
      for (const auto& [opt, series] : per_optimizer) {
        files.push_back(write_series_csv(out_dir + "/risk_vs_n_" + to_string(opt) + ".csv",
                                         "n", series));
      }
      break;
    }
    case PlotKind::kRiskVsP: {
      require(all_same([](const RunReport& r) { return r.n_train; }) &&
                  all_same([](const RunReport& r) { return r.epsilon; }),
              "emit_plot_data: risk-vs-p needs homogeneous (n, epsilon)");
      std::map<OptimizerKind, Series> per_optimizer;
      for (const RunReport* r : ok) {
        require(r->excess_empirical_risk.has_value(),
                "emit_plot_data: report lacks excess empirical risk");
        per_optimizer[r->optimizer]
            .by_x[static_cast<double>(r->p)]
            .push_back(*r->excess_empirical_risk);
      }
      for (const auto& [opt, series] : per_optimizer) {
        files.push_back(write_series_csv(out_dir + "/risk_vs_p_" + to_string(opt) + ".csv",
                                         "p", series));
      }
      break;
    }
  }
  return files;
}

}  // namespace dperm
