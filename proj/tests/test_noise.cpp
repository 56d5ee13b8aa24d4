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

#include "dperm/noise.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace dperm {
namespace {

TEST(SampleGaussian, VanishingSigmaGivesVanishingNorm) {
  Rng rng(1, 0);
  const ParamVector v = sample_gaussian(GaussianSpec(1e-12, 3), rng);
  EXPECT_LT(v.norm(), 1e-9);
}

TEST(SampleGaussian, SameStateReplaysExactly) {
  Rng a(9, 4);
  Rng b(9, 4);
  const ParamVector va = sample_gaussian(GaussianSpec(0.7, 64), a);
  const ParamVector vb = sample_gaussian(GaussianSpec(0.7, 64), b);
  EXPECT_EQ((va - vb).norm(), 0.0);
}

// Frozen single-run moments for one million unit-variance draws; the bands
// are wide enough to survive any reasonable reformulation of the transform,
// the exact values pin the current one.
TEST(SampleGaussian, MillionDrawMomentsGolden) {
  Rng rng(42, 7);
  const ParamVector v = sample_gaussian(GaussianSpec(1.0, 1000000), rng);
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
  EXPECT_GE(mean, -0.005);
  EXPECT_LE(mean, 0.005);
  EXPECT_GE(var, 0.99);
  EXPECT_LE(var, 1.01);
  EXPECT_DOUBLE_EQ(mean, -0.0012001963327073909);
  EXPECT_DOUBLE_EQ(var, 0.99866553926158175);
}

TEST(NoiseNormBound, ExactArithmeticPoint) {
  // 8 log(1/zeta) / p = 1 at zeta = exp(-1/2), p = 4.
  const double zeta = std::exp(-0.5);
  EXPECT_NEAR(noise_norm_bound(1.0, 4, zeta), 4.0, 1e-12);
  EXPECT_NEAR(noise_norm_bound(2.0, 4, zeta), 8.0, 1e-12);
}

TEST(NoiseNormBound, ApproachesSigmaSqrtPAsZetaApproachesOne) {
  const double bound = noise_norm_bound(1.5, 9, 1.0 - 1e-16);
  EXPECT_NEAR(bound, 1.5 * 3.0, 1e-3);
  EXPECT_GE(bound, 1.5 * 3.0);
}

TEST(NoiseNormBound, RegimeViolationIsAnError) {
  // exp(-4/8) ~ 0.6065: anything strictly below is out of regime for p = 4;
  // the endpoint itself is admitted.
  EXPECT_THROW(noise_norm_bound(1.0, 4, 0.05), ConcentrationRegimeError);
  EXPECT_NO_THROW(noise_norm_bound(1.0, 4, zeta_lower_limit(4)));
  EXPECT_NO_THROW(noise_norm_bound(1.0, 4, 0.62));
  EXPECT_THROW(noise_norm_bound(1.0, 100, 1.0), ConcentrationRegimeError);
  // The unchecked variant evaluates the same formula anywhere in (0,1).
  EXPECT_GT(noise_norm_bound_unchecked(1.0, 4, 0.05), 0.0);
}

TEST(NoiseNormBound, MonotoneInSigmaAndZeta) {
  double previous = 0.0;
  for (const double sigma : {0.5, 1.0, 2.0, 4.0}) {
    const double b = noise_norm_bound(sigma, 100, 0.1);
    EXPECT_GT(b, previous);
    previous = b;
  }
  previous = 1e300;
  for (const double zeta : {0.01, 0.05, 0.2, 0.5, 0.9}) {
    const double b = noise_norm_bound(1.0, 100, zeta);
    EXPECT_LT(b, previous);
    previous = b;
  }
}

TEST(ConcentrationCheck, HoldsAtModerateDimension) {
  Rng rng(3, 100);
  const ConcentrationCheck check =
      run_concentration_check(GaussianSpec(1.0, 100), 0.05, 10000, rng);
  EXPECT_LE(check.exceed_fraction, 0.05);
  EXPECT_TRUE(check.holds());
  // Mean norm of a 100-dim standard Gaussian is close to 10.
  EXPECT_GE(check.mean_norm, 9.5);
  EXPECT_LE(check.mean_norm, 10.5);
}

TEST(ConcentrationCheck, HoldsAgainstTheExactBoundPoint) {
  Rng rng(4, 100);
  const double zeta = std::exp(-0.5);
  const ConcentrationCheck check =
      run_concentration_check(GaussianSpec(1.0, 4), zeta, 10000, rng);
  EXPECT_NEAR(check.bound_value, 4.0, 1e-12);
  EXPECT_LE(check.exceed_fraction, zeta);
}

TEST(ConcentrationCheck, ValidOverASmallGrid) {
  // One-sided validity with binomial slack at three standard deviations.
  const long trials = 20000;
  for (const Eigen::Index p : {32L, 100L}) {
    for (const double sigma : {0.5, 2.0}) {
      for (const double zeta : {0.05, 0.3}) {
        Rng rng(5, streams::noise_stream(7, static_cast<int>(p)));
        const ConcentrationCheck check =
            run_concentration_check(GaussianSpec(sigma, p), zeta, trials, rng);
        const double slack =
            3.0 * std::sqrt(zeta * (1.0 - zeta) / static_cast<double>(trials));
        EXPECT_LE(check.exceed_fraction, zeta + slack);
      }
    }
  }
}

TEST(ConcentrationCheck, RejectsTinyTrialCountsAndBadSpecs) {
  Rng rng(6, 0);
  EXPECT_THROW(run_concentration_check(GaussianSpec(1.0, 4), 0.7, 10, rng), ConfigError);
  EXPECT_THROW(GaussianSpec(0.0, 4), ConfigError);
  EXPECT_THROW(GaussianSpec(1.0, 0), ConfigError);
  EXPECT_THROW(run_concentration_check(GaussianSpec(1.0, 4), 0.05, 2000, rng),
               ConcentrationRegimeError);
  EXPECT_NO_THROW(run_concentration_check(GaussianSpec(1.0, 4), 0.05, 2000, rng,
                                          /*enforce_regime=*/false));
}

}  // namespace
}  // namespace dperm
