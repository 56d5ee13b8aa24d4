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

#ifndef DPERM_EXPERIMENT_HPP_
#define DPERM_EXPERIMENT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "dperm/config.hpp"
#include "dperm/dataset_io.hpp"
#include "dperm/synthetic.hpp"
#include "dperm/types.hpp"

namespace dperm {

constexpr int kReportSchemaVersion = 1;

enum class PlotKind { kAccuracyVsEpsilon, kConvergenceCurves, kRiskVsN, kRiskVsP };

std::string to_string(PlotKind k);
PlotKind plot_kind_from_string(const std::string& s);

struct DatasetSource {
  enum class Kind { kCsv, kCache, kSynthetic } kind = Kind::kSynthetic;
  std::string path;
  CsvSchema schema;
  SyntheticSpec synthetic;
};

// One sweep: a dataset source, a grid over (epsilon, n, p, optimizer, seed),
// and the run settings shared by every grid point. The privacy budget's
// delta is bound per run as 1/n_train.
struct ExperimentSpec {
  DatasetSource source;
  double test_fraction = 0.3;
  uint64_t split_seed = 7;
  std::vector<double> epsilons;
  std::vector<Eigen::Index> train_sizes;  // empty: whole training split
  std::vector<Eigen::Index> pad_dims;     // empty: native dimension
  std::vector<uint64_t> seeds;
  std::vector<OptimizerKind> optimizers;
  RunConfig base_config;
  std::string output_dir;
  std::vector<PlotKind> emit;
  double overlay_zeta = 0.05;
  unsigned max_workers = 0;  // 0: hardware concurrency
  bool measure_population = false;
  Eigen::Index population_pool = 100000;

  void validate() const;
};

ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);

// The persisted unit of one training run.
struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string dataset;
  OptimizerKind optimizer = OptimizerKind::kTgp;
  double epsilon = 0.0;
  double delta = 0.0;
  Eigen::Index n_train = 0;
  Eigen::Index n_test = 0;
  Eigen::Index p = 0;
  uint64_t seed = 0;
  // Plan echo.
  double sigma = 0.0;
  int iterations = 0;
  std::string schedule;
  std::optional<double> kappa;
  double eta0 = 0.0;
  double lipschitz_used = 0.0;
  double sigma_constant_c = 0.0;
  // Metrics.
  std::optional<double> final_risk;
  std::optional<double> excess_empirical_risk;
  std::optional<double> oracle_risk;
  std::optional<double> test_accuracy;
  std::optional<double> excess_population_risk;
  std::optional<double> final_grad_norm;
  int degenerate_steps = 0;
  // Closed-form overlays evaluated at the run's parameters.
  std::optional<double> bound_opt_smooth;
  std::optional<double> bound_opt_hoelder;
  std::optional<double> bound_excess_risk;
  std::optional<std::vector<double>> risk_curve;
  std::string status = "ok";  // "ok" or an error message
  double wall_clock_ms = 0.0;  // excluded from determinism contracts

  bool ok() const { return status == "ok"; }
  std::string to_json() const;
};

// Executes one run end to end: plan, train, metrics, overlays. Never throws
// for run-level failures; those come back with status set. When trace_out is
// given the full trace of a successful run is copied there.
RunReport execute_run(const Dataset& train, const Dataset* test, const RunConfig& config,
                      const std::optional<SyntheticSpec>& synthetic_info, double overlay_zeta,
                      bool want_curve, bool measure_population,
                      Eigen::Index population_pool = 100000, TrainTrace* trace_out = nullptr);

// Runs the full grid; writes reports.jsonl, aggregate.csv and any requested
// plot files under spec.output_dir. Individual run failures are recorded in
// their reports; spec-level problems throw.
std::vector<RunReport> run_experiment(const ExperimentSpec& spec);

// Plot-data emission: one CSV per curve with columns (x, mean, min, max)
// aggregated over seeds. Reports must agree on every non-plotted key.
std::vector<std::string> emit_plot_data(const std::vector<RunReport>& reports, PlotKind kind,
                                        const std::string& out_dir);

// Deterministic ordering used for aggregate outputs.
bool report_key_less(const RunReport& a, const RunReport& b);

std::string aggregate_csv(std::vector<RunReport> reports);

}  // namespace dperm

#endif  // DPERM_EXPERIMENT_HPP_
