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

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "dperm/synthetic.hpp"

namespace dperm {
namespace {

LossModel least_squares(double lambda = 0.0) {
  LossSpec spec;
  spec.family = LossFamily::kLeastSquares;
  spec.lambda = lambda;
  return LossModel(spec);
}

LossModel logistic(double lambda) {
  LossSpec spec;
  spec.family = LossFamily::kRegLogistic;
  spec.lambda = lambda;
  return LossModel(spec);
}

Dataset regression_data(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Dataset data;
  data.features = x;
  data.labels = y;
  data.task = Task::kRegression;
  return data;
}

// Two duplicated rows keep n >= 2 while pinning the full gradient exactly.
Dataset gradient_probe(double gx, double gy) {
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 0.0, 0.0, 1.0;
  Eigen::VectorXd y(2);
  y << -gx, -gy;  // grad of mean squared loss at 0 is -(2/n) sum y_i x_i
  return regression_data(x, y);
}

TEST(TgpStep, PlainGradientStep) {
  const Dataset data = gradient_probe(1.0, 0.0);
  Rng rng(0, 0);
  const StepResult step = tgp_step(ParamVector::Zero(2), 0, least_squares(), data, 0.5, 0.0,
                                   rng, std::nullopt, 1e6);
  EXPECT_DOUBLE_EQ(step.theta[0], -0.5);
  EXPECT_DOUBLE_EQ(step.theta[1], 0.0);
  EXPECT_DOUBLE_EQ(step.entry.grad_norm, 1.0);
  EXPECT_DOUBLE_EQ(step.entry.noise_norm, 0.0);
}

TEST(TgpStep, ExactOneStepOnMatchedQuadratic) {
  // Mean squared loss with x = 1, y = 0 has curvature 2; step 1/2 lands on
  // the minimizer from anywhere.
  Eigen::MatrixXd x(2, 1);
  x << 1.0, 1.0;
  const Dataset data = regression_data(x, Eigen::VectorXd::Zero(2));
  Rng rng(0, 0);
  ParamVector theta(1);
  theta << 5.0;
  const StepResult step =
      tgp_step(theta, 0, least_squares(), data, 0.5, 0.0, rng, std::nullopt, 1e6);
  EXPECT_DOUBLE_EQ(step.theta[0], 0.0);
}

TEST(TgpStep, NoisyStepIsNoiselessStepPlusScaledNoise) {
  const Dataset data = gradient_probe(0.4, -0.2);
  const double eta = 0.3;
  Rng rng_a(7, 1);
  const StepResult noiseless = tgp_step(ParamVector::Zero(2), 0, least_squares(), data, eta,
                                        0.0, rng_a, std::nullopt, 1e6);
  Rng rng_b(7, 1);
  const StepResult noisy = tgp_step(ParamVector::Zero(2), 0, least_squares(), data, eta, 0.01,
                                    rng_b, std::nullopt, 1e6);
  const ParamVector reconstructed = noiseless.theta - eta * noisy.noise;
  EXPECT_LE((noisy.theta - reconstructed).norm(), 1e-15);
}

TEST(NormalizeDirection, RescalesOnlyBelowUnitNorm) {
  ParamVector small(2);
  small << 0.3, 0.4;
  const NormalizationResult r1 = normalize_direction(small);
  EXPECT_DOUBLE_EQ(r1.pre_norm, 0.5);
  EXPECT_NEAR(small[0], 0.6, 1e-15);
  EXPECT_NEAR(small[1], 0.8, 1e-15);
  EXPECT_NEAR(r1.post_norm, 1.0, 1e-15);
  EXPECT_FALSE(r1.degenerate);

  ParamVector large(2);
  large << 1.2, 1.6;
  const NormalizationResult r2 = normalize_direction(large);
  EXPECT_DOUBLE_EQ(r2.pre_norm, 2.0);
  EXPECT_DOUBLE_EQ(large[0], 1.2);
  EXPECT_DOUBLE_EQ(large[1], 1.6);

  // Norm exactly 1: strict inequality leaves the direction alone.
  ParamVector unit(2);
  unit << 0.6, 0.8;
  const NormalizationResult r3 = normalize_direction(unit);
  EXPECT_DOUBLE_EQ(r3.pre_norm, r3.post_norm);
  EXPECT_DOUBLE_EQ(unit[0], 0.6);

  ParamVector zero = ParamVector::Zero(2);
  const NormalizationResult r4 = normalize_direction(zero);
  EXPECT_TRUE(r4.degenerate);
  EXPECT_EQ(zero.norm(), 0.0);
}

TEST(MngpStep, NormalizesTheNoisyDirection) {
  const Dataset data = gradient_probe(0.3, 0.4);
  Rng rng(0, 0);
  const StepResult step = mngp_step(ParamVector::Zero(2), 0, least_squares(), data, 1.0, 0.0,
                                    rng, std::nullopt, 1e6);
  EXPECT_NEAR(step.theta[0], -0.6, 1e-15);
  EXPECT_NEAR(step.theta[1], -0.8, 1e-15);
  EXPECT_DOUBLE_EQ(step.entry.pre_normalization_norm, 0.5);
  EXPECT_NEAR(step.entry.post_normalization_norm, 1.0, 1e-15);
}

TEST(MngpStep, LargeDirectionsPassThrough) {
  const Dataset data = gradient_probe(1.2, 1.6);
  Rng rng(0, 0);
  const StepResult step = mngp_step(ParamVector::Zero(2), 0, least_squares(), data, 0.25, 0.0,
                                    rng, std::nullopt, 1e6);
  EXPECT_NEAR(step.theta[0], -0.3, 1e-15);
  EXPECT_NEAR(step.theta[1], -0.4, 1e-15);
  EXPECT_DOUBLE_EQ(step.entry.pre_normalization_norm, 2.0);
  EXPECT_DOUBLE_EQ(step.entry.post_normalization_norm, 2.0);
}

TEST(MngpStep, ZeroDirectionIsDegenerateZeroStep) {
  // Interpolating parameters: the gradient vanishes and sigma = 0.
  Eigen::MatrixXd x(2, 1);
  x << 1.0, 0.5;
  Eigen::VectorXd y(2);
  y << 0.0, 0.0;
  const Dataset data = regression_data(x, y);
  Rng rng(0, 0);
  const StepResult step = mngp_step(ParamVector::Zero(1), 0, least_squares(), data, 1.0, 0.0,
                                    rng, std::nullopt, 1e6);
  EXPECT_TRUE(step.entry.degenerate_step);
  EXPECT_EQ(step.entry.step_norm, 0.0);
}

RunConfig quadratic_config() {
  RunConfig config;
  config.seed = 3;
  config.optimizer = OptimizerKind::kNonPrivateGd;
  config.schedule.kind = ScheduleKind::kConstantOneOverL;
  config.iterations_policy = IterationsPolicy::kFixedT;
  config.fixed_iterations = 200;
  config.projection_enabled = false;
  config.loss.family = LossFamily::kLeastSquares;
  return config;
}

// Condition-10 quadratic: mean squared loss over rows e1 and sqrt(0.1) e2
// has curvature spectrum {1, 0.1}.
Dataset condition_ten_quadratic() {
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 0.0, 0.0, std::sqrt(0.1);
  Eigen::VectorXd y(2);
  y << 1.0, std::sqrt(0.1);
  return regression_data(x, y);
}

TEST(Train, NoiseFreeContractionEveryStep) {
  const Dataset data = condition_ten_quadratic();
  RunConfig config = quadratic_config();
  config.constants_override.smoothness = 1.0;
  config.projection_radius = 100.0;

  const LossModel model = least_squares();
  AssumptionConstants constants = model.derive_constants(data, 100.0);
  constants.apply(config.constants_override);
  const NoisePlan plan = build_noise_plan(config, constants, data.size());
  const TrainTrace trace =
      train(config, plan, model, data, ParamVector::Zero(2), constants);

  ASSERT_EQ(trace.entries.size(), 200u);
  const double risk_star = 0.0;
  double previous = model.empirical_risk(ParamVector::Zero(2), data);
  for (const TraceEntry& e : trace.entries) {
    EXPECT_LE(e.empirical_risk - risk_star, 0.9 * (previous - risk_star) + 1e-12);
    previous = e.empirical_risk;
  }
}

TEST(Train, TraceIsMonotoneInIterationIndex) {
  const Dataset data = condition_ten_quadratic();
  RunConfig config = quadratic_config();
  config.constants_override.smoothness = 1.0;
  config.projection_radius = 100.0;
  config.fixed_iterations = 17;
  const LossModel model = least_squares();
  AssumptionConstants constants = model.derive_constants(data, 100.0);
  constants.apply(config.constants_override);
  const NoisePlan plan = build_noise_plan(config, constants, data.size());
  const TrainTrace trace =
      train(config, plan, model, data, ParamVector::Zero(2), constants);
  ASSERT_EQ(static_cast<int>(trace.entries.size()), 17);
  for (int t = 0; t < 17; ++t) EXPECT_EQ(trace.entries[static_cast<size_t>(t)].t, t);
}

TEST(Train, LongRunDrivesGradientToZero) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kLogisticSeparable;
  spec.n = 20;
  spec.p = 3;
  spec.seed = 11;
  const Dataset data = generate_synthetic(spec);
  RunConfig config;
  config.optimizer = OptimizerKind::kNonPrivateGd;
  config.schedule.kind = ScheduleKind::kConstantOneOverL;
  config.iterations_policy = IterationsPolicy::kFixedT;
  config.fixed_iterations = 10000;
  config.projection_radius = 50.0;
  config.loss.family = LossFamily::kRegLogistic;
  config.loss.lambda = 0.1;
  const LossModel model = logistic(0.1);
  const AssumptionConstants constants = model.derive_constants(data, 50.0);
  const NoisePlan plan = build_noise_plan(config, constants, data.size());
  const TrainTrace trace =
      train(config, plan, model, data, ParamVector::Zero(3), constants);
  ParamVector grad(3);
  model.empirical_risk_and_gradient(trace.final_params, data, grad);
  EXPECT_LE(grad.norm(), 1e-8);
}

RunConfig noisy_config(OptimizerKind opt) {
  RunConfig config;
  config.seed = 17;
  config.optimizer = opt;
  config.schedule.kind = ScheduleKind::kConstantOneOverL;
  config.iterations_policy = IterationsPolicy::kFixedT;
  config.fixed_iterations = 40;
  config.projection_radius = 1.5;
  config.epsilon = 1.0;
  config.delta = 0.01;
  config.loss.family = LossFamily::kRegLogistic;
  config.loss.lambda = 0.1;
  config.record_noise_vectors = true;
  return config;
}

// Replaying the recorded noise through the update arithmetic must land on
// exactly the same iterates.
TEST(Train, RecordedNoiseReplaysBitForBit) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kLogisticSeparable;
  spec.n = 50;
  spec.p = 4;
  spec.seed = 23;
  const Dataset data = generate_synthetic(spec);
  const RunConfig config = noisy_config(OptimizerKind::kTgp);
  const LossModel model = logistic(0.1);
  const AssumptionConstants constants = model.derive_constants(data, 1.5);
  const NoisePlan plan = build_noise_plan(config, constants, data.size());
  const TrainTrace trace =
      train(config, plan, model, data, ParamVector::Zero(4), constants);
  ASSERT_EQ(trace.noise_vectors.size(), trace.entries.size());

  ParamVector theta = ParamVector::Zero(4);
  ParamVector grad(4);
  for (std::size_t t = 0; t < trace.entries.size(); ++t) {
    const double eta = learning_rate(plan.schedule, static_cast<int>(t), constants);
    model.empirical_risk_and_gradient(theta, data, grad);
    theta = project_to_ball(theta - eta * (grad + trace.noise_vectors[t]),
                            *config.projection_radius);
    EXPECT_LE(theta.norm(), *config.projection_radius + 1e-12);
  }
  EXPECT_EQ((theta - trace.final_params).norm(), 0.0);
}

TEST(Train, DeterministicAcrossRepeats) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kLogisticSeparable;
  spec.n = 40;
  spec.p = 3;
  spec.seed = 29;
  const Dataset data = generate_synthetic(spec);
  for (const OptimizerKind opt : {OptimizerKind::kTgp, OptimizerKind::kMngp}) {
    const RunConfig config = noisy_config(opt);
    const LossModel model = logistic(0.1);
    const AssumptionConstants constants = model.derive_constants(data, 1.5);
    const NoisePlan plan = build_noise_plan(config, constants, data.size());
    const TrainTrace a = train(config, plan, model, data, ParamVector::Zero(3), constants);
    const TrainTrace b = train(config, plan, model, data, ParamVector::Zero(3), constants);
    EXPECT_EQ(a.to_csv(), b.to_csv());
    EXPECT_EQ((a.final_params - b.final_params).norm(), 0.0);
  }
}

TEST(Train, MngpDirectionNormInvariantHoldsOverTrace) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kLogisticSeparable;
  spec.n = 60;
  spec.p = 4;
  spec.seed = 31;
  const Dataset data = generate_synthetic(spec);
  const RunConfig config = noisy_config(OptimizerKind::kMngp);
  const LossModel model = logistic(0.1);
  const AssumptionConstants constants = model.derive_constants(data, 1.5);
  const NoisePlan plan = build_noise_plan(config, constants, data.size());
  const TrainTrace trace =
      train(config, plan, model, data, ParamVector::Zero(4), constants);
  for (const TraceEntry& e : trace.entries) {
    if (!e.degenerate_step) {
      EXPECT_GE(e.post_normalization_norm, 1.0 - 1e-12);
    }
    if (e.pre_normalization_norm >= 1.0) {
      EXPECT_DOUBLE_EQ(e.pre_normalization_norm, e.post_normalization_norm);
    }
  }
}

TEST(Train, DivergenceCarriesPartialTrace) {
  const Dataset data = condition_ten_quadratic();
  RunConfig config = quadratic_config();
  config.projection_enabled = false;
  config.projection_radius = 100.0;
  // Step far above 2/L: iterates explode geometrically.
  config.constants_override.smoothness = 0.05;
  config.fixed_iterations = 400;
  const LossModel model = least_squares();
  AssumptionConstants constants = model.derive_constants(data, 100.0);
  constants.apply(config.constants_override);
  const NoisePlan plan = build_noise_plan(config, constants, data.size());
  try {
    train(config, plan, model, data, ParamVector::Ones(2) * 3.0, constants);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_LT(e.partial_trace.entries.size(), 400u);
  }
}

TEST(SolveNonprivate, MatchesNormalEquations) {
  Rng rng(37, streams::kGeneric);
  const Eigen::Index n = 12, p = 3;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ParamVector row(p);
    for (Eigen::Index j = 0; j < p; ++j) row[j] = rng.next_gaussian();
    row *= 0.9 / row.norm();
    x.row(i) = row.transpose();
    y[i] = rng.next_gaussian();
  }
  const Dataset data = regression_data(x, y);
  const Minimizer solved = solve_nonprivate(least_squares(), data, 1e-10, 200000);
  const ParamVector closed_form =
      (x.transpose() * x).ldlt().solve(x.transpose() * y);
  EXPECT_LE((solved.theta - closed_form).norm(), 1e-8);
}

TEST(SolveNonprivate, FindsQuadraticCenter) {
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 0.0, 0.0, 1.0;
  Eigen::VectorXd y(2);
  y << 0.3, -0.7;
  const Minimizer solved =
      solve_nonprivate(least_squares(), regression_data(x, y), 1e-10, 100000);
  EXPECT_NEAR(solved.theta[0], 0.3, 1e-9);
  EXPECT_NEAR(solved.theta[1], -0.7, 1e-9);
  EXPECT_NEAR(solved.risk, 0.0, 1e-16);
}

TEST(SolveNonprivate, SymmetricPairMinimizerIsAlongTheFeature) {
  Eigen::MatrixXd x(2, 2);
  x << 0.8, 0.6, -0.8, -0.6;
  Dataset data;
  data.features = x;
  data.labels.resize(2);
  data.labels << 1.0, -1.0;
  data.task = Task::kClassification;
  const Minimizer solved = solve_nonprivate(logistic(0.1), data, 1e-10, 100000);
  // Both examples agree on the direction (0.8, 0.6); the minimizer must be a
  // positive multiple of it.
  const ParamVector direction = solved.theta / solved.theta.norm();
  EXPECT_NEAR(direction[0], 0.8, 1e-6);
  EXPECT_NEAR(direction[1], 0.6, 1e-6);
}

TEST(SolveNonprivate, IterationBudgetIsEnforced) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kLogisticSeparable;
  spec.n = 30;
  spec.p = 3;
  spec.seed = 43;
  const Dataset data = generate_synthetic(spec);
  EXPECT_THROW(solve_nonprivate(logistic(0.01), data, 1e-14, 3), OracleError);
}

TEST(NoiseSaltFor, PoliciesKeyStreamsAsDocumented) {
  Dataset a;
  a.features = Eigen::MatrixXd::Zero(2, 2);
  a.labels = Eigen::VectorXd::Ones(2);
  Dataset b = a;
  b.features(0, 0) = 0.5;
  EXPECT_EQ(noise_salt_for(NoiseStreamPolicy::kShared, 9, a),
            noise_salt_for(NoiseStreamPolicy::kShared, 12, b));
  EXPECT_EQ(noise_salt_for(NoiseStreamPolicy::kIndependent, 9, a), 9u);
  EXPECT_NE(noise_salt_for(NoiseStreamPolicy::kDatasetHash, 9, a),
            noise_salt_for(NoiseStreamPolicy::kDatasetHash, 9, b));
}

}  // namespace
}  // namespace dperm
