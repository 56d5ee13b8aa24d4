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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dperm/bounds.hpp"
#include "dperm/config.hpp"
#include "dperm/dataset_io.hpp"
#include "dperm/experiment.hpp"
#include "dperm/noise.hpp"
#include "dperm/optimize.hpp"
#include "dperm/privacy.hpp"
#include "dperm/stability.hpp"
#include "dperm/synthetic.hpp"

namespace {

using nlohmann::json;

std::string data_dir() {
  if (const char* env = std::getenv("DPERM_DATA_DIR")) return env;
  return ".";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dperm::Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct DataFlags {
  std::string csv_path;
  std::string cache_path;
  std::string synthetic_path;
  std::string label_column;
  bool no_header = false;
  std::string delimiter = ",";
  bool one_vs_rest = false;
  std::string task = "classification";

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", csv_path, "CSV dataset path");
    cmd->add_option("--cache", cache_path, "preprocessed dataset cache path");
    cmd->add_option("--synthetic", synthetic_path, "synthetic generator spec (JSON file)");
    cmd->add_option("--label", label_column, "label column (name, or index without header)");
    cmd->add_flag("--no-header", no_header, "CSV has no header row");
    cmd->add_option("--delimiter", delimiter, "CSV delimiter (default ,)");
    cmd->add_flag("--one-vs-rest", one_vs_rest,
                  "reduce a multiclass label to one-vs-rest on its smallest class");
    cmd->add_option("--task", task, "classification|regression");
  }

  dperm::CsvSchema schema() const {
    dperm::CsvSchema s;
    s.label_column = label_column;
    s.has_header = !no_header;
    if (delimiter.size() != 1) throw dperm::ConfigError("delimiter must be one character");
    s.delimiter = delimiter[0];
    s.one_vs_rest = one_vs_rest;
    s.task = task == "regression" ? dperm::Task::kRegression : dperm::Task::kClassification;
    return s;
  }

  std::pair<dperm::Dataset, std::optional<dperm::SyntheticSpec>> load() const {
    if (!synthetic_path.empty()) {
      const json j = json::parse(read_file(synthetic_path));
      dperm::SyntheticSpec spec;
      spec.kind = dperm::synthetic_kind_from_string(j.at("kind").get<std::string>());
      spec.n = j.value("n", static_cast<Eigen::Index>(100));
      spec.p = j.value("p", static_cast<Eigen::Index>(10));
      spec.seed = j.value("seed", uint64_t{0});
      spec.feature_radius = j.value("feature_radius", 1.0);
      spec.theta_scale = j.value("theta_scale", 1.0);
      spec.label_noise = j.value("label_noise", 0.1);
      spec.margin = j.value("margin", 0.5);
      spec.flip_probability = j.value("flip_probability", 0.1);
      return {dperm::generate_synthetic(spec), spec};
    }
    if (!cache_path.empty()) return {dperm::load_dataset_cache(cache_path), std::nullopt};
    if (!csv_path.empty()) {
      if (label_column.empty()) throw dperm::ConfigError("--label is required with --data");
      return {dperm::ingest_csv(csv_path, schema()), std::nullopt};
    }
    throw dperm::ConfigError("one of --data/--cache/--synthetic is required");
  }
};

int cmd_ingest(const DataFlags& flags, const std::string& out, const std::string& name) {
  if (flags.csv_path.empty()) throw dperm::ConfigError("ingest: --data is required");
  dperm::Dataset data = dperm::ingest_csv(flags.csv_path, flags.schema());
  if (!name.empty()) data.name = name;
  std::string target = out;
  if (target.empty()) {
    const std::string base =
        name.empty() ? std::filesystem::path(flags.csv_path).stem().string() : name;
    target = data_dir() + "/" + base + ".cache.csv";
  }
  dperm::write_dataset_cache(data, target);
  json summary = {{"cache", target},
                  {"n", data.size()},
                  {"p", data.dim()},
                  {"task", data.task == dperm::Task::kClassification ? "classification"
                                                                     : "regression"}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_run(const DataFlags& flags, const std::string& config_path, const std::string& out_dir,
            double test_fraction, uint64_t split_seed) {
  dperm::RunConfig config = dperm::load_run_config(config_path);
  auto [data, synthetic] = flags.load();

  dperm::Dataset train = data;
  std::optional<dperm::Dataset> test;
  if (!synthetic) {
    auto [tr, te] = dperm::train_test_split(data, test_fraction, split_seed);
    train = std::move(tr);
    test = std::move(te);
  }
  if (config.optimizer != dperm::OptimizerKind::kNonPrivateGd) {
    if (!config.epsilon) throw dperm::ConfigError("run: config must set epsilon");
    if (!config.delta) config.delta = 1.0 / static_cast<double>(train.size());
  }

  dperm::TrainTrace trace;
  const dperm::RunReport report =
      dperm::execute_run(train, test ? &*test : nullptr, config, synthetic,
                         /*overlay_zeta=*/0.05, /*want_curve=*/false,
                         /*measure_population=*/false, 100000, &trace);
  std::filesystem::create_directories(out_dir);
  if (report.ok()) trace.write_csv(out_dir + "/trace.csv");
  dperm::write_file_atomic(out_dir + "/report.json", report.to_json() + "\n");
  std::cout << report.to_json() << "\n";
  return report.ok() ? 0 : 1;
}

int cmd_sweep(const std::string& spec_path) {
  const dperm::ExperimentSpec spec = dperm::load_experiment_spec(spec_path);
  const auto reports = dperm::run_experiment(spec);
  std::size_t failed = 0;
  for (const auto& r : reports) {
    if (!r.ok()) ++failed;
  }
  json summary = {{"runs", reports.size()},
                  {"failed", failed},
                  {"output_dir", spec.output_dir}};
  std::cout << summary.dump() << "\n";
  return 0;  // failed runs are data, not a sweep failure
}

int cmd_stability(const DataFlags& flags, const std::string& config_path, int pairs,
                  uint64_t seed, const std::string& out_path) {
  dperm::RunConfig config = dperm::load_run_config(config_path);
  auto [data, synthetic] = flags.load();
  if (config.optimizer != dperm::OptimizerKind::kNonPrivateGd) {
    if (!config.epsilon) throw dperm::ConfigError("stability: config must set epsilon");
    if (!config.delta) config.delta = 1.0 / static_cast<double>(data.size());
  }
  if (!config.projection_radius) {
    throw dperm::ConfigError("stability: projection.radius is required");
  }

  dperm::Dataset pool;
  if (synthetic) {
    pool = dperm::generate_synthetic_population(*synthetic,
                                                std::max<Eigen::Index>(64, data.size() / 4));
  } else {
    // Hold out a tail of the seeded shuffle as the replacement pool.
    const Eigen::Index pool_size = std::max<Eigen::Index>(16, data.size() / 10);
    auto [kept, held_out] = dperm::train_test_split(
        data, static_cast<double>(pool_size) / static_cast<double>(data.size()), seed);
    data = std::move(kept);
    pool = std::move(held_out);
  }

  const dperm::LossModel model(config.loss);
  dperm::AssumptionConstants constants =
      model.derive_constants(data, *config.projection_radius);
  constants.apply(config.constants_override);
  const dperm::NoisePlan plan = dperm::build_noise_plan(config, constants, data.size());

  const auto adjacent = dperm::sample_adjacent_pairs(data, pool, pairs, seed);
  std::ostringstream lines;
  int satisfied = 0;
  for (std::size_t i = 0; i < adjacent.size(); ++i) {
    dperm::RunConfig pair_config = config;
    pair_config.seed = seed + i;
    const dperm::StabilityReport report =
        dperm::measure_argument_stability(adjacent[i], pair_config, plan, model, constants);
    if (report.satisfied) ++satisfied;
    json j = {{"pair", i},
              {"replaced_index", adjacent[i].replaced_index},
              {"argument_gap", report.argument_gap},
              {"bound_value", report.bound_value},
              {"empirical_gap_base", report.empirical_gap_base},
              {"empirical_gap_variant", report.empirical_gap_variant},
              {"minimizer_shift", report.minimizer_shift},
              {"minimizer_shift_bound", report.minimizer_shift_bound},
              {"loss_stability", report.loss_stability},
              {"satisfied", report.satisfied}};
    lines << j.dump() << "\n";
  }
  if (out_path.empty()) {
    std::cout << lines.str();
  } else {
    dperm::write_file_atomic(out_path, lines.str());
  }
  std::cerr << "satisfied " << satisfied << "/" << adjacent.size() << "\n";
  return 0;
}

int cmd_noise_check(double sigma, Eigen::Index dim, double zeta, long trials, uint64_t seed,
                    bool unchecked) {
  dperm::Rng rng(seed, dperm::streams::kGeneric);
  const dperm::ConcentrationCheck check = dperm::run_concentration_check(
      dperm::GaussianSpec(sigma, dim), zeta, trials, rng, !unchecked);
  json j = {{"sigma", check.sigma},
            {"dim", check.dim},
            {"zeta", check.zeta},
            {"samples", check.samples},
            {"bound_value", check.bound_value},
            {"exceed_fraction", check.exceed_fraction},
            {"mean_norm", check.mean_norm},
            {"holds", check.holds()}};
  std::cout << j.dump() << "\n";
  return 0;
}

struct BoundsFlags {
  std::string kind = "opt_smooth";
  std::vector<Eigen::Index> n_values{1000};
  std::vector<Eigen::Index> p_values{10};
  std::vector<double> epsilon_values{1.0};
  double delta = 1e-3;
  double zeta = 0.05;
  int iterations = 0;  // 0: 3 log n
  double lipschitz = 1.0;
  double smoothness = 0.35;
  double hoelder_constant = 0.35;
  double hoelder_exponent = 1.0;
  double mu = 0.1;
  double loss_bound = 1.0;
  double domain_radius = 10.0;
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;
  double sigma_c = 2.0;
};

int cmd_bounds(const BoundsFlags& flags, const std::string& out_path) {
  dperm::AssumptionConstants constants;
  constants.lipschitz = flags.lipschitz;
  constants.smoothness = flags.smoothness;
  constants.hoelder_constant = flags.hoelder_constant;
  constants.hoelder_exponent = flags.hoelder_exponent;
  constants.pl_constant = flags.mu;
  constants.loss_bound = flags.loss_bound;
  constants.domain_radius = flags.domain_radius;
  constants.hoelder_lipschitz =
      std::max(2.0 * flags.hoelder_constant * flags.domain_radius, flags.hoelder_constant);

  std::string csv = "kind,n,p,epsilon,iterations,zeta,zeta_in_regime,value\n";
  for (const Eigen::Index n : flags.n_values) {
    for (const Eigen::Index p : flags.p_values) {
      for (const double eps : flags.epsilon_values) {
        dperm::BoundInput input;
        input.n = n;
        input.p = p;
        input.epsilon = eps;
        input.delta = flags.delta;
        input.zeta = flags.zeta;
        input.iterations =
            flags.iterations > 0
                ? flags.iterations
                : static_cast<int>(std::ceil(3.0 * std::log(static_cast<double>(n))));
        input.constants = constants;
        input.c1 = flags.c1;
        input.c2 = flags.c2;
        input.c3 = flags.c3;
        input.sigma_constant_c = flags.sigma_c;
        double value = 0.0;
        if (flags.kind == "opt_smooth") {
          value = dperm::opt_error_bound_smooth(input);
        } else if (flags.kind == "opt_hoelder") {
          value = dperm::opt_error_bound_hoelder(input);
        } else if (flags.kind == "smooth_const") {
          value = dperm::excess_risk_bound(dperm::ExcessRiskRegime::kSmoothConstStep, input);
        } else if (flags.kind == "hoelder_decay") {
          value = dperm::excess_risk_bound(dperm::ExcessRiskRegime::kHoelderDecaying, input);
        } else if (flags.kind == "hoelder_norm") {
          value = dperm::excess_risk_bound(dperm::ExcessRiskRegime::kHoelderNormalized, input);
        } else {
          throw dperm::ConfigError("bounds: unknown kind '" + flags.kind + "'");
        }
        csv += flags.kind + ',' + std::to_string(n) + ',' + std::to_string(p) + ',' +
               dperm::format_double(eps) + ',' + std::to_string(input.iterations) + ',' +
               dperm::format_double(flags.zeta) + ',' +
               (input.zeta_in_regime() ? "1" : "0") + ',' + dperm::format_double(value) + '\n';
      }
    }
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    dperm::write_file_atomic(out_path, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private ERM laboratory"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and cache a dataset");
  DataFlags ingest_flags;
  ingest_flags.attach(ingest);
  std::string ingest_out, ingest_name;
  ingest->add_option("--out", ingest_out, "cache file path");
  ingest->add_option("--name", ingest_name, "dataset name");

  // run
  auto* run = app.add_subcommand("run", "single training run");
  DataFlags run_flags;
  run_flags.attach(run);
  std::string run_config_path, run_out = "run_out";
  double run_test_fraction = 0.3;
  uint64_t run_split_seed = 7;
  run->add_option("--config", run_config_path, "run config file")->required();
  run->add_option("--out", run_out, "output directory");
  run->add_option("--test-fraction", run_test_fraction, "test split fraction");
  run->add_option("--split-seed", run_split_seed, "split seed");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
  std::string sweep_spec;
  sweep->add_option("--spec", sweep_spec, "experiment spec (JSON)")->required();

  // stability
  auto* stab = app.add_subcommand("stability", "adjacent-dataset stability measurements");
  DataFlags stab_flags;
  stab_flags.attach(stab);
  std::string stab_config_path, stab_out;
  int stab_pairs = 10;
  uint64_t stab_seed = 0;
  stab->add_option("--config", stab_config_path, "run config file")->required();
  stab->add_option("--pairs", stab_pairs, "number of adjacent pairs");
  stab->add_option("--seed", stab_seed, "pair-sampling seed");
  stab->add_option("--out", stab_out, "output JSONL path (default stdout)");

  // noise-check
  auto* noise = app.add_subcommand("noise-check", "Monte-Carlo check of the norm bound");
  double nc_sigma = 1.0, nc_zeta = 0.05;
  Eigen::Index nc_dim = 100;
  long nc_trials = 10000;
  uint64_t nc_seed = 0;
  bool nc_unchecked = false;
  noise->add_option("--sigma", nc_sigma, "per-coordinate standard deviation");
  noise->add_option("--dim", nc_dim, "dimension");
  noise->add_option("--zeta", nc_zeta, "tail probability");
  noise->add_option("--trials", nc_trials, "Monte-Carlo trials");
  noise->add_option("--seed", nc_seed, "sampling seed");
  noise->add_flag("--unchecked", nc_unchecked, "skip the zeta regime check");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "closed-form bound values over a grid");
  BoundsFlags bf;
  std::string bounds_out;
  bounds->add_option("--kind", bf.kind,
                     "opt_smooth|opt_hoelder|smooth_const|hoelder_decay|hoelder_norm");
  bounds->add_option("--n", bf.n_values, "n grid");
  bounds->add_option("--p", bf.p_values, "p grid");
  bounds->add_option("--epsilon", bf.epsilon_values, "epsilon grid");
  bounds->add_option("--delta", bf.delta, "delta");
  bounds->add_option("--zeta", bf.zeta, "tail probability");
  bounds->add_option("--iterations", bf.iterations, "iteration count (0: 3 log n)");
  bounds->add_option("--lipschitz", bf.lipschitz, "gradient bound G");
  bounds->add_option("--smoothness", bf.smoothness, "smoothness constant L");
  bounds->add_option("--hoelder-constant", bf.hoelder_constant, "Hoelder constant H");
  bounds->add_option("--hoelder-exponent", bf.hoelder_exponent, "Hoelder exponent alpha");
  bounds->add_option("--mu", bf.mu, "curvature constant mu");
  bounds->add_option("--loss-bound", bf.loss_bound, "loss upper bound");
  bounds->add_option("--domain-radius", bf.domain_radius, "parameter ball radius");
  bounds->add_option("--c1", bf.c1, "first multiplier");
  bounds->add_option("--c2", bf.c2, "second multiplier");
  bounds->add_option("--c3", bf.c3, "third multiplier");
  bounds->add_option("--sigma-c", bf.sigma_c, "calibration constant");
  bounds->add_option("--out", bounds_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(ingest_flags, ingest_out, ingest_name);
    if (*run) return cmd_run(run_flags, run_config_path, run_out, run_test_fraction,
                             run_split_seed);
    if (*sweep) return cmd_sweep(sweep_spec);
    if (*stab) return cmd_stability(stab_flags, stab_config_path, stab_pairs, stab_seed,
                                    stab_out);
    if (*noise) return cmd_noise_check(nc_sigma, nc_dim, nc_zeta, nc_trials, nc_seed,
                                       nc_unchecked);
    if (*bounds) return cmd_bounds(bf, bounds_out);
  } catch (const dperm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
