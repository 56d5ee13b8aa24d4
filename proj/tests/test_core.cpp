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

#include <gtest/gtest.h>

#include "dperm/config.hpp"
#include "dperm/rng.hpp"
#include "dperm/types.hpp"

namespace dperm {
namespace {

ParamVector vec2(double a, double b) {
  ParamVector v(2);
  v << a, b;
  return v;
}

TEST(Projection, RescalesOutsidePoint) {
  const ParamVector projected = project_to_ball(vec2(3.0, 4.0), 1.0);
  EXPECT_NEAR(projected[0], 0.6, 1e-15);
  EXPECT_NEAR(projected[1], 0.8, 1e-15);
}

TEST(Projection, IdentityInsideBall) {
  const ParamVector projected = project_to_ball(vec2(0.1, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(projected[0], 0.1);
  EXPECT_DOUBLE_EQ(projected[1], 0.2);
}

TEST(Projection, ZeroVectorIsFixedPoint) {
  const ParamVector projected = project_to_ball(vec2(0.0, 0.0), 1.0);
  EXPECT_EQ(projected.norm(), 0.0);
}

TEST(Projection, Idempotent) {
  Rng rng(5, streams::kGeneric);
  for (int trial = 0; trial < 200; ++trial) {
    ParamVector x(4);
    for (int i = 0; i < 4; ++i) x[i] = 4.0 * (rng.next_double() - 0.5);
    const ParamVector once = project_to_ball(x, 0.7);
    const ParamVector twice = project_to_ball(once, 0.7);
    EXPECT_LE((once - twice).norm(), 1e-15);
    EXPECT_LE(once.norm(), 0.7 + 1e-12);
  }
}

TEST(Projection, NonExpansive) {
  Rng rng(6, streams::kGeneric);
  for (int trial = 0; trial < 200; ++trial) {
    ParamVector x(5), y(5);
    for (int i = 0; i < 5; ++i) {
      x[i] = 6.0 * (rng.next_double() - 0.5);
      y[i] = 6.0 * (rng.next_double() - 0.5);
    }
    const double before = (x - y).norm();
    const double after = (project_to_ball(x, 1.3) - project_to_ball(y, 1.3)).norm();
    EXPECT_LE(after, before + 1e-12);
  }
}

TEST(Projection, RejectsNonPositiveRadius) {
  EXPECT_THROW(project_to_ball(vec2(1.0, 0.0), 0.0), ConfigError);
}

TEST(PrivacyBudget, ValidatesRanges) {
  EXPECT_NO_THROW(PrivacyBudget(0.5, 1e-3));
  EXPECT_THROW(PrivacyBudget(0.0, 1e-3), ConfigError);
  EXPECT_THROW(PrivacyBudget(1.0, 0.0), ConfigError);
  EXPECT_THROW(PrivacyBudget(1.0, 1.0), ConfigError);
}

TEST(Dataset, ValidationCatchesBadShapes) {
  Dataset data;
  data.features = Eigen::MatrixXd::Zero(1, 2);
  data.labels = Eigen::VectorXd::Ones(1);
  EXPECT_THROW(data.validate(), DataError);  // n < 2

  data.features = Eigen::MatrixXd::Zero(3, 2);
  data.labels = Eigen::VectorXd::Ones(3);
  EXPECT_NO_THROW(data.validate());

  data.labels[1] = 0.5;  // not +/-1
  EXPECT_THROW(data.validate(), DataError);

  data.labels[1] = -1.0;
  data.features(0, 0) = 2.0;  // row norm > 1
  EXPECT_THROW(data.validate(), DataError);
}

TEST(Dataset, ContentHashSeparatesDatasets) {
  Dataset a;
  a.features = Eigen::MatrixXd::Zero(2, 2);
  a.labels = Eigen::VectorXd::Ones(2);
  Dataset b = a;
  EXPECT_EQ(a.content_hash(), b.content_hash());
  b.features(1, 1) = 0.5;
  EXPECT_NE(a.content_hash(), b.content_hash());
}

TEST(RunConfig, RoundTripsThroughText) {
  RunConfig cfg;
  cfg.seed = 99;
  cfg.optimizer = OptimizerKind::kMngp;
  cfg.schedule.kind = ScheduleKind::kConstantHoelder;
  cfg.schedule.kappa = 12.5;
  cfg.iterations_policy = IterationsPolicy::kHoelderPower;
  cfg.sigma_constant_c = 1.5;
  cfg.projection_radius = 2.0;
  cfg.noise_policy = NoiseStreamPolicy::kDatasetHash;
  cfg.loss.family = LossFamily::kQNormHinge;
  cfg.loss.q = 1.5;
  cfg.loss.mu_override = 0.25;
  cfg.epsilon = 0.7;
  cfg.delta = 1e-3;
  cfg.constants_override.smoothness = 1.0;

  const RunConfig parsed = parse_run_config(serialize_run_config(cfg));
  EXPECT_EQ(parsed.seed, cfg.seed);
  EXPECT_EQ(parsed.optimizer, cfg.optimizer);
  EXPECT_EQ(parsed.schedule.kind, cfg.schedule.kind);
  EXPECT_DOUBLE_EQ(*parsed.schedule.kappa, *cfg.schedule.kappa);
  EXPECT_EQ(parsed.iterations_policy, cfg.iterations_policy);
  EXPECT_DOUBLE_EQ(parsed.sigma_constant_c, cfg.sigma_constant_c);
  EXPECT_DOUBLE_EQ(*parsed.projection_radius, *cfg.projection_radius);
  EXPECT_EQ(parsed.noise_policy, cfg.noise_policy);
  EXPECT_EQ(parsed.loss.family, cfg.loss.family);
  EXPECT_DOUBLE_EQ(parsed.loss.q, cfg.loss.q);
  EXPECT_DOUBLE_EQ(*parsed.loss.mu_override, *cfg.loss.mu_override);
  EXPECT_DOUBLE_EQ(*parsed.epsilon, *cfg.epsilon);
  EXPECT_DOUBLE_EQ(*parsed.delta, *cfg.delta);
  EXPECT_DOUBLE_EQ(*parsed.constants_override.smoothness, 1.0);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_run_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("seed\n"), ConfigError);
  EXPECT_THROW(parse_run_config("epsilon = abc\n"), ConfigError);
  EXPECT_NO_THROW(parse_run_config("# comment\n\nseed = 3\n"));
}

TEST(TrainTrace, CsvIsStableAndExact) {
  TrainTrace trace;
  TraceEntry e;
  e.t = 0;
  e.empirical_risk = 1.0 / 3.0;
  e.grad_norm = 0.1;
  e.noise_norm = 2e-17;
  e.step_norm = 12345.678901234567;
  trace.entries.push_back(e);
  const std::string csv = trace.to_csv();
  EXPECT_EQ(csv, trace.to_csv());
  EXPECT_NE(csv.find("t,risk,grad_norm,noise_norm,step_norm\n"), std::string::npos);
  EXPECT_NE(csv.find("0.33333333333333331"), std::string::npos);
}

}  // namespace
}  // namespace dperm
