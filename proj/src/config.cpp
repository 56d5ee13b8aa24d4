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

#include "dperm/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dperm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + value);
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw ConfigError("config: bad boolean value for '" + key + "': " + value);
}

}  // namespace

std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kTgp: return "tgp";
    case OptimizerKind::kMngp: return "mngp";
    case OptimizerKind::kNonPrivateGd: return "gd";
  }
  return "?";
}

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::kConstantOneOverL: return "one_over_l";
    case ScheduleKind::kConstantHoelder: return "hoelder";
    case ScheduleKind::kDecayingPl: return "decaying_pl";
  }
  return "?";
}

std::string to_string(IterationsPolicy p) {
  switch (p) {
    case IterationsPolicy::kFixedT: return "fixed";
    case IterationsPolicy::kLogN: return "log_n";
    case IterationsPolicy::kHoelderPower: return "hoelder_power";
  }
  return "?";
}

std::string to_string(NoiseStreamPolicy p) {
  switch (p) {
    case NoiseStreamPolicy::kShared: return "shared";
    case NoiseStreamPolicy::kIndependent: return "independent";
    case NoiseStreamPolicy::kDatasetHash: return "dataset_hash";
  }
  return "?";
}

std::string to_string(LossFamily f) {
  switch (f) {
    case LossFamily::kRegLogistic: return "logistic";
    case LossFamily::kLeastSquares: return "least_squares";
    case LossFamily::kQNormHinge: return "q_hinge";
    case LossFamily::kQPowerAbsolute: return "q_power";
  }
  return "?";
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "tgp") return OptimizerKind::kTgp;
  if (s == "mngp") return OptimizerKind::kMngp;
  if (s == "gd") return OptimizerKind::kNonPrivateGd;
  throw ConfigError("config: unknown optimizer '" + s + "'");
}

ScheduleKind schedule_from_string(const std::string& s) {
  if (s == "one_over_l") return ScheduleKind::kConstantOneOverL;
  if (s == "hoelder") return ScheduleKind::kConstantHoelder;
  if (s == "decaying_pl") return ScheduleKind::kDecayingPl;
  throw ConfigError("config: unknown schedule '" + s + "'");
}

IterationsPolicy iterations_policy_from_string(const std::string& s) {
  if (s == "fixed") return IterationsPolicy::kFixedT;
  if (s == "log_n") return IterationsPolicy::kLogN;
  if (s == "hoelder_power") return IterationsPolicy::kHoelderPower;
  throw ConfigError("config: unknown iterations policy '" + s + "'");
}

NoiseStreamPolicy noise_policy_from_string(const std::string& s) {
  if (s == "shared") return NoiseStreamPolicy::kShared;
  if (s == "independent") return NoiseStreamPolicy::kIndependent;
  if (s == "dataset_hash") return NoiseStreamPolicy::kDatasetHash;
  throw ConfigError("config: unknown noise policy '" + s + "'");
}

LossFamily loss_family_from_string(const std::string& s) {
  if (s == "logistic") return LossFamily::kRegLogistic;
  if (s == "least_squares") return LossFamily::kLeastSquares;
  if (s == "q_hinge") return LossFamily::kQNormHinge;
  if (s == "q_power") return LossFamily::kQPowerAbsolute;
  throw ConfigError("config: unknown loss family '" + s + "'");
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"seed", [&](const std::string& k, const std::string& v) { cfg.seed = parse_u64(k, v); }},
          {"optimizer", [&](const std::string&, const std::string& v) { cfg.optimizer = optimizer_from_string(v); }},
          {"schedule", [&](const std::string&, const std::string& v) { cfg.schedule.kind = schedule_from_string(v); }},
          {"schedule.kappa", [&](const std::string& k, const std::string& v) { cfg.schedule.kappa = parse_double(k, v); }},
          {"iterations", [&](const std::string&, const std::string& v) { cfg.iterations_policy = iterations_policy_from_string(v); }},
          {"iterations.t", [&](const std::string& k, const std::string& v) { cfg.fixed_iterations = parse_int(k, v); }},
          {"iterations.log_multiplier", [&](const std::string& k, const std::string& v) { cfg.logn_multiplier = parse_double(k, v); }},
          {"sigma_c", [&](const std::string& k, const std::string& v) { cfg.sigma_constant_c = parse_double(k, v); }},
          {"projection.radius", [&](const std::string& k, const std::string& v) { cfg.projection_radius = parse_double(k, v); }},
          {"projection.enabled", [&](const std::string& k, const std::string& v) { cfg.projection_enabled = parse_bool(k, v); }},
          {"noise.policy", [&](const std::string&, const std::string& v) { cfg.noise_policy = noise_policy_from_string(v); }},
          {"noise.salt", [&](const std::string& k, const std::string& v) { cfg.noise_salt = parse_u64(k, v); }},
          {"loss.family", [&](const std::string&, const std::string& v) { cfg.loss.family = loss_family_from_string(v); }},
          {"loss.lambda", [&](const std::string& k, const std::string& v) { cfg.loss.lambda = parse_double(k, v); }},
          {"loss.q", [&](const std::string& k, const std::string& v) { cfg.loss.q = parse_double(k, v); }},
          {"loss.mu", [&](const std::string& k, const std::string& v) { cfg.loss.mu_override = parse_double(k, v); }},
          {"epsilon", [&](const std::string& k, const std::string& v) { cfg.epsilon = parse_double(k, v); }},
          {"delta", [&](const std::string& k, const std::string& v) { cfg.delta = parse_double(k, v); }},
          {"oracle.tolerance", [&](const std::string& k, const std::string& v) { cfg.oracle_tolerance = parse_double(k, v); }},
          {"oracle.max_iterations", [&](const std::string& k, const std::string& v) { cfg.oracle_max_iterations = parse_int(k, v); }},
          {"divergence.max_norm", [&](const std::string& k, const std::string& v) { cfg.divergence_norm = parse_double(k, v); }},
          {"record.noise_vectors", [&](const std::string& k, const std::string& v) { cfg.record_noise_vectors = parse_bool(k, v); }},
          {"constants.lipschitz", [&](const std::string& k, const std::string& v) { cfg.constants_override.lipschitz = parse_double(k, v); }},
          {"constants.smoothness", [&](const std::string& k, const std::string& v) { cfg.constants_override.smoothness = parse_double(k, v); }},
          {"constants.hoelder_constant", [&](const std::string& k, const std::string& v) { cfg.constants_override.hoelder_constant = parse_double(k, v); }},
          {"constants.hoelder_exponent", [&](const std::string& k, const std::string& v) { cfg.constants_override.hoelder_exponent = parse_double(k, v); }},
          {"constants.pl", [&](const std::string& k, const std::string& v) { cfg.constants_override.pl_constant = parse_double(k, v); }},
          {"constants.loss_bound", [&](const std::string& k, const std::string& v) { cfg.constants_override.loss_bound = parse_double(k, v); }},
      };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "seed = " << cfg.seed << "\n";
  out << "optimizer = " << to_string(cfg.optimizer) << "\n";
  out << "schedule = " << to_string(cfg.schedule.kind) << "\n";
  if (cfg.schedule.kappa) out << "schedule.kappa = " << format_double(*cfg.schedule.kappa) << "\n";
  out << "iterations = " << to_string(cfg.iterations_policy) << "\n";
  out << "iterations.t = " << cfg.fixed_iterations << "\n";
  out << "iterations.log_multiplier = " << format_double(cfg.logn_multiplier) << "\n";
  out << "sigma_c = " << format_double(cfg.sigma_constant_c) << "\n";
  if (cfg.projection_radius) out << "projection.radius = " << format_double(*cfg.projection_radius) << "\n";
  out << "projection.enabled = " << (cfg.projection_enabled ? 1 : 0) << "\n";
  out << "noise.policy = " << to_string(cfg.noise_policy) << "\n";
  out << "noise.salt = " << cfg.noise_salt << "\n";
  out << "loss.family = " << to_string(cfg.loss.family) << "\n";
  out << "loss.lambda = " << format_double(cfg.loss.lambda) << "\n";
  out << "loss.q = " << format_double(cfg.loss.q) << "\n";
  if (cfg.loss.mu_override) out << "loss.mu = " << format_double(*cfg.loss.mu_override) << "\n";
  if (cfg.epsilon) out << "epsilon = " << format_double(*cfg.epsilon) << "\n";
  if (cfg.delta) out << "delta = " << format_double(*cfg.delta) << "\n";
  out << "oracle.tolerance = " << format_double(cfg.oracle_tolerance) << "\n";
  out << "oracle.max_iterations = " << cfg.oracle_max_iterations << "\n";
  out << "divergence.max_norm = " << format_double(cfg.divergence_norm) << "\n";
  out << "record.noise_vectors = " << (cfg.record_noise_vectors ? 1 : 0) << "\n";
  const ConstantsOverride& ov = cfg.constants_override;
  if (ov.lipschitz) out << "constants.lipschitz = " << format_double(*ov.lipschitz) << "\n";
  if (ov.smoothness) out << "constants.smoothness = " << format_double(*ov.smoothness) << "\n";
  if (ov.hoelder_constant) out << "constants.hoelder_constant = " << format_double(*ov.hoelder_constant) << "\n";
  if (ov.hoelder_exponent) out << "constants.hoelder_exponent = " << format_double(*ov.hoelder_exponent) << "\n";
  if (ov.pl_constant) out << "constants.pl = " << format_double(*ov.pl_constant) << "\n";
  if (ov.loss_bound) out << "constants.loss_bound = " << format_double(*ov.loss_bound) << "\n";
  return out.str();
}

}  // namespace dperm
