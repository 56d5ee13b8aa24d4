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

#ifndef DPERM_PRIVACY_HPP_
#define DPERM_PRIVACY_HPP_

#include <optional>

#include "dperm/config.hpp"
#include "dperm/losses.hpp"
#include "dperm/types.hpp"

namespace dperm {

// Derived noise calibration for one run: per-coordinate standard deviation,
// iteration count, step-size schedule, and the gradient bound it was
// calibrated against. Immutable once built.
struct NoisePlan {
  double sigma = 0.0;
  int iterations = 0;
  ScheduleSpec schedule;
  std::optional<PrivacyBudget> budget;  // absent for non-private runs
  double lipschitz_used = 0.0;
  double sigma_constant_c = 0.0;

  // Reconstructs sigma^2 from the stored fields; holds exactly by
  // construction for private plans.
  double implied_sigma_squared(Eigen::Index n) const;
};

// sigma = sqrt(c * G_eff^2 * T * log(1/delta)) / (n * eps).
double calibrate_sigma(const PrivacyBudget& budget, double g_eff, int iterations,
                       Eigen::Index n, double c);

// Iteration-count policies: fixed pass-through, ceil(a * log n), or
// ceil(n^(2 / (1 + 2 alpha))).
int choose_iterations(IterationsPolicy policy, Eigen::Index n, double alpha, int fixed_t,
                      double logn_multiplier);

// Step size at iteration t:
//   one_over_l:   1 / L
//   hoelder:      (1 / H)^(1 / alpha)
//   decaying_pl:  2 / (mu (t + kappa)), kappa >= 2 H^(1/alpha) / mu
double learning_rate(const ScheduleSpec& schedule, int t, const AssumptionConstants& constants);

// Gradient bound used in the calibration: the Lipschitz constant when the
// loss is smooth, otherwise the bound implied by Hoelder continuity over the
// bounded domain.
double effective_lipschitz(const AssumptionConstants& constants);

// Binds sigma, T and the schedule for the given run. Validates that the
// schedule's constants exist and defaults the decay offset kappa to its
// smallest admissible value. Non-private runs get sigma = 0 and no budget.
NoisePlan build_noise_plan(const RunConfig& config, const AssumptionConstants& constants,
                           Eigen::Index n);

}  // namespace dperm

#endif  // DPERM_PRIVACY_HPP_
