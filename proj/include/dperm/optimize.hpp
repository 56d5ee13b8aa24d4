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

#ifndef DPERM_OPTIMIZE_HPP_
#define DPERM_OPTIMIZE_HPP_

#include <optional>

#include "dperm/config.hpp"
#include "dperm/losses.hpp"
#include "dperm/privacy.hpp"
#include "dperm/rng.hpp"
#include "dperm/types.hpp"

namespace dperm {

struct NormalizationResult {
  double pre_norm = 0.0;
  double post_norm = 0.0;
  bool degenerate = false;
};

// The normalization branch: rescales the direction to unit norm when its
// norm is strictly below 1 and positive; a zero direction is left alone and
// flagged. Reads nothing but the (already noised) direction.
NormalizationResult normalize_direction(ParamVector& direction);

struct StepResult {
  ParamVector theta;
  TraceEntry entry;
  ParamVector noise;  // empty when sigma == 0
};

// One perturbed gradient step: theta' = P(theta - eta (grad + b)) with
// b ~ N(0, sigma^2 I) drawn from the supplied stream. The returned trace
// entry has every field except the post-step risk filled in.
StepResult tgp_step(const ParamVector& theta, int t, const LossModel& model,
                    const Dataset& data, double eta, double sigma, Rng& noise_rng,
                    const std::optional<double>& projection_radius, double divergence_norm);

// Same step with the noisy direction routed through normalize_direction.
StepResult mngp_step(const ParamVector& theta, int t, const LossModel& model,
                     const Dataset& data, double eta, double sigma, Rng& noise_rng,
                     const std::optional<double>& projection_radius, double divergence_norm);

// Runs plan.iterations steps of the configured optimizer from theta0 and
// returns the full trace. Deterministic given (config, data): noise at
// iteration t comes from stream noise_stream(salt, t) where the salt follows
// the configured stream policy. Throws DivergenceError with the partial
// trace attached if an iterate blows up.
TrainTrace train(const RunConfig& config, const NoisePlan& plan, const LossModel& model,
                 const Dataset& data, const ParamVector& theta0,
                 const AssumptionConstants& constants);

struct Minimizer {
  ParamVector theta;
  double risk = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

// Deterministic reference solver for argmin of the empirical risk:
// projected gradient descent with backtracking. Converged when the
// projected-gradient residual drops below tol; throws OracleError otherwise.
Minimizer solve_nonprivate(const LossModel& model, const Dataset& data, double tol,
                           int max_iterations,
                           const std::optional<double>& projection_radius = std::nullopt);

// Salt for the per-iteration noise streams under the given policy.
uint64_t noise_salt_for(NoiseStreamPolicy policy, uint64_t configured_salt,
                        const Dataset& data);

}  // namespace dperm

#endif  // DPERM_OPTIMIZE_HPP_
