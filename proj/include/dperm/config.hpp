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

#ifndef DPERM_CONFIG_HPP_
#define DPERM_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "dperm/rng.hpp"
#include "dperm/types.hpp"

namespace dperm {

enum class OptimizerKind { kTgp, kMngp, kNonPrivateGd };

enum class ScheduleKind { kConstantOneOverL, kConstantHoelder, kDecayingPl };

enum class IterationsPolicy { kFixedT, kLogN, kHoelderPower };

// How noise streams are keyed when two runs operate on adjacent datasets:
// shared reuses the same streams, independent salts the two runs apart, and
// dataset-hash derives the salt from the dataset contents.
enum class NoiseStreamPolicy { kShared, kIndependent, kDatasetHash };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kConstantOneOverL;
  // Step-decay offset for the decaying schedule; when unset the smallest
  // admissible value 2*H^(1/alpha)/mu is bound at plan time.
  std::optional<double> kappa;
};

enum class LossFamily { kRegLogistic, kLeastSquares, kQNormHinge, kQPowerAbsolute };

struct LossSpec {
  LossFamily family = LossFamily::kRegLogistic;
  double lambda = 0.0;  // L2 regularization weight
  double q = 2.0;       // exponent for the q-norm families, in (1, 2]
  // Externally supplied curvature constant for families where none can be
  // derived from regularization.
  std::optional<double> mu_override;
};

// Explicitly pinned model constants; any field set here wins over the value
// derived from the loss family.
struct ConstantsOverride {
  std::optional<double> lipschitz;
  std::optional<double> smoothness;
  std::optional<double> hoelder_constant;
  std::optional<double> hoelder_exponent;
  std::optional<double> pl_constant;
  std::optional<double> loss_bound;
};

struct RunConfig {
  uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kTgp;
  ScheduleSpec schedule;
  IterationsPolicy iterations_policy = IterationsPolicy::kLogN;
  int fixed_iterations = 100;
  double logn_multiplier = 3.0;
  // The calibration constant in sigma^2 = c * G^2 * T * log(1/delta) / (n eps)^2.
  double sigma_constant_c = 2.0;
  std::optional<double> projection_radius;
  bool projection_enabled = true;
  NoiseStreamPolicy noise_policy = NoiseStreamPolicy::kIndependent;
  uint64_t noise_salt = streams::kNoiseSaltDefault;
  LossSpec loss;
  std::optional<double> epsilon;
  std::optional<double> delta;
  double oracle_tolerance = 1e-10;
  int oracle_max_iterations = 200000;
  double divergence_norm = 1e6;
  bool record_noise_vectors = false;
  ConstantsOverride constants_override;

  PrivacyBudget budget() const {
    if (!epsilon || !delta) throw ConfigError("RunConfig: epsilon/delta not set");
    return PrivacyBudget(*epsilon, *delta);
  }
};

// Flat key-value config file: one `key = value` per line, `#` comments.
// Unknown keys are rejected. See README for the key list.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& config);

std::string to_string(OptimizerKind k);
std::string to_string(ScheduleKind k);
std::string to_string(IterationsPolicy p);
std::string to_string(NoiseStreamPolicy p);
std::string to_string(LossFamily f);

OptimizerKind optimizer_from_string(const std::string& s);
ScheduleKind schedule_from_string(const std::string& s);
IterationsPolicy iterations_policy_from_string(const std::string& s);
NoiseStreamPolicy noise_policy_from_string(const std::string& s);
LossFamily loss_family_from_string(const std::string& s);

}  // namespace dperm

#endif  // DPERM_CONFIG_HPP_
