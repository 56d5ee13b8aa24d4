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

#include "dperm/optimize.hpp"

#include <cmath>

#include "dperm/noise.hpp"

namespace dperm {

namespace {

void check_finite_or_throw(const ParamVector& theta, double divergence_norm,
                           TrainTrace partial) {
  if (!theta.allFinite()) {
    throw DivergenceError("train: non-finite iterate", std::move(partial));
  }
  if (theta.norm() > divergence_norm) {
    throw DivergenceError("train: iterate norm exceeded divergence threshold",
                          std::move(partial));
  }
}

ParamVector maybe_project(ParamVector theta, const std::optional<double>& radius) {
  if (radius) return project_to_ball(theta, *radius);
  return theta;
}

StepResult perturbed_step(const ParamVector& theta, int t, const LossModel& model,
                          const Dataset& data, double eta, double sigma, Rng& noise_rng,
                          const std::optional<double>& projection_radius,
                          double divergence_norm, bool normalized) {
  if (!(eta > 0.0)) throw ConfigError("step: eta must be positive");
  if (sigma < 0.0) throw ConfigError("step: sigma must be nonnegative");

  StepResult result;
  result.entry.t = t;

  ParamVector grad(theta.size());
  model.empirical_risk_and_gradient(theta, data, grad);
  if (!grad.allFinite()) {
    throw DivergenceError("step: non-finite gradient", TrainTrace{});
  }
  result.entry.grad_norm = grad.norm();

  ParamVector direction = grad;
  if (sigma > 0.0) {
    result.noise = sample_gaussian(GaussianSpec(sigma, theta.size()), noise_rng);
    result.entry.noise_norm = result.noise.norm();
    direction += result.noise;
  }

  if (normalized) {
    const NormalizationResult norm = normalize_direction(direction);
    result.entry.pre_normalization_norm = norm.pre_norm;
    result.entry.post_normalization_norm = norm.post_norm;
    result.entry.degenerate_step = norm.degenerate;
  } else {
    const double d = direction.norm();
    result.entry.pre_normalization_norm = d;
    result.entry.post_normalization_norm = d;
  }

  result.theta = maybe_project(theta - eta * direction, projection_radius);
  result.entry.step_norm = (result.theta - theta).norm();
  check_finite_or_throw(result.theta, divergence_norm, TrainTrace{});
  return result;
}

}  // namespace

NormalizationResult normalize_direction(ParamVector& direction) {
  NormalizationResult res;
  res.pre_norm = direction.norm();
  if (res.pre_norm == 0.0) {
    res.post_norm = 0.0;
    res.degenerate = true;
    return res;
  }
  if (res.pre_norm < 1.0) {
    direction /= res.pre_norm;
    res.post_norm = direction.norm();
  } else {
    res.post_norm = res.pre_norm;
  }
  return res;
}

StepResult tgp_step(const ParamVector& theta, int t, const LossModel& model,
                    const Dataset& data, double eta, double sigma, Rng& noise_rng,
                    const std::optional<double>& projection_radius, double divergence_norm) {
  return perturbed_step(theta, t, model, data, eta, sigma, noise_rng, projection_radius,
                        divergence_norm, /*normalized=*/false);
}

StepResult mngp_step(const ParamVector& theta, int t, const LossModel& model,
                     const Dataset& data, double eta, double sigma, Rng& noise_rng,
                     const std::optional<double>& projection_radius, double divergence_norm) {
  return perturbed_step(theta, t, model, data, eta, sigma, noise_rng, projection_radius,
                        divergence_norm, /*normalized=*/true);
}

uint64_t noise_salt_for(NoiseStreamPolicy policy, uint64_t configured_salt,
                        const Dataset& data) {
  switch (policy) {
    case NoiseStreamPolicy::kShared:
      return streams::kNoiseSaltDefault;
    case NoiseStreamPolicy::kIndependent:
      return configured_salt;
    case NoiseStreamPolicy::kDatasetHash:
      return data.content_hash();
  }
  throw Error("unreachable");
}

TrainTrace train(const RunConfig& config, const NoisePlan& plan, const LossModel& model,
                 const Dataset& data, const ParamVector& theta0,
                 const AssumptionConstants& constants) {
  if (theta0.size() != data.dim()) {
    throw DimensionError("train: theta0 dimension does not match data");
  }
  const bool normalized = config.optimizer == OptimizerKind::kMngp;
  const double sigma = config.optimizer == OptimizerKind::kNonPrivateGd ? 0.0 : plan.sigma;
  const std::optional<double> radius =
      config.projection_enabled ? config.projection_radius : std::nullopt;
  const uint64_t salt = noise_salt_for(config.noise_policy, config.noise_salt, data);

  TrainTrace trace;
  trace.entries.reserve(static_cast<std::size_t>(plan.iterations));
  ParamVector theta = maybe_project(theta0, radius);

  for (int t = 0; t < plan.iterations; ++t) {
    const double eta = learning_rate(plan.schedule, t, constants);
    Rng noise_rng(config.seed, streams::noise_stream(salt, t));
    StepResult step;
    try {
      step = normalized ? mngp_step(theta, t, model, data, eta, sigma, noise_rng, radius,
                                    config.divergence_norm)
                        : tgp_step(theta, t, model, data, eta, sigma, noise_rng, radius,
                                   config.divergence_norm);
    } catch (DivergenceError& e) {
      e.partial_trace = std::move(trace);
      e.partial_trace.final_params = theta;
      throw;
    }
    theta = std::move(step.theta);
    // The entry's risk describes the iterate this step produced; filled here
    // so the trace needs no second pass over the data.
    step.entry.empirical_risk = model.empirical_risk(theta, data);
    trace.entries.push_back(step.entry);
    if (config.record_noise_vectors) {
      trace.noise_vectors.push_back(sigma > 0.0 ? step.noise
                                                : ParamVector::Zero(theta.size()));
    }
  }
  trace.final_params = theta;
  return trace;
}

Minimizer solve_nonprivate(const LossModel& model, const Dataset& data, double tol,
                           int max_iterations,
                           const std::optional<double>& projection_radius) {
  if (!(tol > 0.0)) throw ConfigError("solve_nonprivate: tol must be positive");
  AssumptionConstants constants =
      model.derive_constants(data, projection_radius.value_or(1e6));

  // Reference step for the residual criterion; backtracking adapts around it.
  const double eta0 = constants.smoothness
                          ? 1.0 / *constants.smoothness
                          : std::pow(1.0 / constants.hoelder_constant,
                                     1.0 / constants.hoelder_exponent);
  double eta = eta0;

  Minimizer result;
  ParamVector theta = maybe_project(ParamVector::Zero(data.dim()), projection_radius);
  ParamVector grad(data.dim());
  double risk = model.empirical_risk_and_gradient(theta, data, grad);

  for (int iter = 0; iter < max_iterations; ++iter) {
    const ParamVector reference = maybe_project(theta - eta0 * grad, projection_radius);
    const double residual = (theta - reference).norm() / eta0;
    if (residual <= tol) {
      result.theta = theta;
      result.risk = risk;
      result.grad_norm = grad.norm();
      result.iterations = iter;
      return result;
    }

    ParamVector candidate;
    double candidate_risk = 0.0;
    bool accepted = false;
    // The slack is relative to the risk scale: near convergence the true
    // decrease falls below one ulp of the risk and can no longer be
    // certified through function values.
    const double slack = 1e-14 * std::max(1.0, std::fabs(risk));
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      candidate = maybe_project(theta - eta * grad, projection_radius);
      candidate_risk = model.empirical_risk(candidate, data);
      const double decrease = 0.5 / eta * (theta - candidate).squaredNorm();
      if (candidate_risk <= risk - decrease + slack) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      throw OracleError("solve_nonprivate: line search failed to make progress");
    }
    theta = std::move(candidate);
    risk = model.empirical_risk_and_gradient(theta, data, grad);
    eta = std::min(eta * 1.5, eta0);
  }

  const ParamVector reference = maybe_project(theta - eta0 * grad, projection_radius);
  if ((theta - reference).norm() / eta0 <= tol) {
    result.theta = theta;
    result.risk = risk;
    result.grad_norm = grad.norm();
    result.iterations = max_iterations;
    return result;
  }
  throw OracleError("solve_nonprivate: not converged within iteration budget");
}

}  // namespace dperm
