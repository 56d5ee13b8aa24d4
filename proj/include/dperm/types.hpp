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

#ifndef DPERM_TYPES_HPP_
#define DPERM_TYPES_HPP_

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dperm {

using ParamVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or unsatisfiable schedule/plan requirements.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Mismatched vector/matrix shapes between model, parameters and data.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (CSV parse failures, label issues).
class DataError : public Error {
 public:
  using Error::Error;
};

// A tail-probability parameter outside the interval the bound is stated for.
class ConcentrationRegimeError : public Error {
 public:
  using Error::Error;
};

// The non-private solver ran out of iterations before reaching tolerance.
class OracleError : public Error {
 public:
  using Error::Error;
};

struct ColumnScale {
  double mean = 0.0;
  double stddev = 1.0;
};

enum class Task { kClassification, kRegression };

// Labeled examples with preprocessing metadata. Feature rows are kept at
// L2 norm <= 1 so that the loss-model constants stay finite.
struct Dataset {
  Eigen::MatrixXd features;  // n x p
  Eigen::VectorXd labels;    // n; +/-1 for classification
  std::string name;
  Task task = Task::kClassification;
  std::vector<ColumnScale> feature_scale;  // applied at ingestion, may be empty

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  // Throws DataError when a structural invariant is broken.
  void validate() const;

  // Content hash over features, labels and task; used to key noise streams
  // off the dataset identity.
  uint64_t content_hash() const;
};

struct PrivacyBudget {
  double epsilon;
  double delta;

  PrivacyBudget(double eps, double del) : epsilon(eps), delta(del) {
    if (!(epsilon > 0.0)) throw ConfigError("PrivacyBudget: epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("PrivacyBudget: delta must lie in (0,1)");
  }
};

// Euclidean projection onto the centered ball of the given radius.
ParamVector project_to_ball(const ParamVector& theta, double radius);

struct TraceEntry {
  int t = 0;
  double empirical_risk = 0.0;  // risk of the iterate produced by this step
  double grad_norm = 0.0;
  double noise_norm = 0.0;
  double step_norm = 0.0;
  // Direction norms around the normalization branch; equal for plain steps.
  double pre_normalization_norm = 0.0;
  double post_normalization_norm = 0.0;
  bool degenerate_step = false;
};

struct TrainTrace {
  std::vector<TraceEntry> entries;
  ParamVector final_params;
  // Per-iteration noise vectors, retained only when the run asks for them.
  std::vector<ParamVector> noise_vectors;

  // CSV with a fixed header: t,risk,grad_norm,noise_norm,step_norm.
  // Formatting is locale-free and round-trip exact so that identical runs
  // produce byte-identical files.
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

// Aborted run: carries whatever trace had been recorded before the blow-up.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, TrainTrace partial)
      : Error(what), partial_trace(std::move(partial)) {}
  TrainTrace partial_trace;
};

// Locale-free shortest round-trip double formatting ("%.17g" trimmed).
std::string format_double(double v);

// Atomic file write: writes to a sibling temp file, then renames over path.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace dperm

#endif  // DPERM_TYPES_HPP_
