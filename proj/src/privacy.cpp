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

#include "dperm/privacy.hpp"

#include <cmath>

namespace dperm {

double NoisePlan::implied_sigma_squared(Eigen::Index n) const {
  if (!budget) return 0.0;
  const double nd = static_cast<double>(n);
  return sigma_constant_c * lipschitz_used * lipschitz_used *
         static_cast<double>(iterations) * std::log(1.0 / budget->delta) /
         (nd * nd * budget->epsilon * budget->epsilon);
}

double calibrate_sigma(const PrivacyBudget& budget, double g_eff, int iterations,
                       Eigen::Index n, double c) {
  if (!(g_eff > 0.0)) throw ConfigError("calibrate_sigma: gradient bound must be positive");
  if (iterations < 1) throw ConfigError("calibrate_sigma: iteration count must be positive");
  if (n < 1) throw ConfigError("calibrate_sigma: n must be positive");
  if (!(c > 0.0)) throw ConfigError("calibrate_sigma: constant c must be positive");
  const double nd = static_cast<double>(n);
  return std::sqrt(c * g_eff * g_eff * static_cast<double>(iterations) *
                   std::log(1.0 / budget.delta)) /
         (nd * budget.epsilon);
}

int choose_iterations(IterationsPolicy policy, Eigen::Index n, double alpha, int fixed_t,
                      double logn_multiplier) {
  if (n < 2) throw ConfigError("choose_iterations: n must be at least 2");
  switch (policy) {
    case IterationsPolicy::kFixedT:
      if (fixed_t < 1) throw ConfigError("choose_iterations: fixed T must be positive");
      return fixed_t;
    case IterationsPolicy::kLogN:
      if (!(logn_multiplier > 0.0)) {
        throw ConfigError("choose_iterations: log-n multiplier must be positive");
      }
      return static_cast<int>(std::ceil(logn_multiplier * std::log(static_cast<double>(n))));
    case IterationsPolicy::kHoelderPower: {
      if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("choose_iterations: alpha must lie in (0, 1]");
      }
      const double exponent = 2.0 / (1.0 + 2.0 * alpha);
      return static_cast<int>(std::ceil(std::pow(static_cast<double>(n), exponent)));
    }
  }
  throw Error("unreachable");
}

double learning_rate(const ScheduleSpec& schedule, int t, const AssumptionConstants& c) {
  if (t < 0) throw ConfigError("learning_rate: iteration index must be nonnegative");
  switch (schedule.kind) {
    case ScheduleKind::kConstantOneOverL:
      if (!c.smoothness) throw ConfigError("learning_rate: smoothness constant unavailable");
      return 1.0 / *c.smoothness;
    case ScheduleKind::kConstantHoelder:
      if (!(c.hoelder_constant > 0.0)) {
        throw ConfigError("learning_rate: Hoelder constant unavailable");
      }
      return std::pow(1.0 / c.hoelder_constant, 1.0 / c.hoelder_exponent);
    case ScheduleKind::kDecayingPl: {
      if (!c.pl_constant) throw ConfigError("learning_rate: PL constant unavailable");
      if (!schedule.kappa) throw ConfigError("learning_rate: kappa not bound");
      return 2.0 / (*c.pl_constant * (static_cast<double>(t) + *schedule.kappa));
    }
  }
  throw Error("unreachable");
}

double effective_lipschitz(const AssumptionConstants& constants) {
  if (constants.smoothness) return constants.lipschitz;
  if (!(constants.hoelder_lipschitz > 0.0)) {
    throw ConfigError("effective_lipschitz: no usable gradient bound");
  }
  return constants.hoelder_lipschitz;
}

NoisePlan build_noise_plan(const RunConfig& config, const AssumptionConstants& constants,
                           Eigen::Index n) {
  NoisePlan plan;
  plan.schedule = config.schedule;
  plan.sigma_constant_c = config.sigma_constant_c;
  plan.iterations = choose_iterations(config.iterations_policy, n, constants.hoelder_exponent,
                                      config.fixed_iterations, config.logn_multiplier);

  if (plan.schedule.kind == ScheduleKind::kDecayingPl) {
    if (!constants.pl_constant) {
      throw ConfigError("build_noise_plan: PL constant unavailable for decaying schedule");
    }
    const double kappa_min = 2.0 *
                             std::pow(constants.hoelder_constant, 1.0 / constants.hoelder_exponent) /
                             *constants.pl_constant;
    if (!plan.schedule.kappa) {
      plan.schedule.kappa = kappa_min;
    } else if (*plan.schedule.kappa < kappa_min * (1.0 - 1e-12)) {
      throw ConfigError("build_noise_plan: kappa below 2 H^(1/alpha) / mu");
    }
  }
  // Fails fast when the schedule needs a constant the model cannot provide.
  (void)learning_rate(plan.schedule, 0, constants);

  if (config.optimizer == OptimizerKind::kNonPrivateGd) {
    plan.sigma = 0.0;
    plan.lipschitz_used = effective_lipschitz(constants);
    return plan;
  }
  plan.budget = config.budget();
  plan.lipschitz_used = effective_lipschitz(constants);
  plan.sigma = calibrate_sigma(*plan.budget, plan.lipschitz_used, plan.iterations, n,
                               config.sigma_constant_c);
  return plan;
}

}  // namespace dperm
