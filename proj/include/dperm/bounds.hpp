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

#ifndef DPERM_BOUNDS_HPP_
#define DPERM_BOUNDS_HPP_

#include "dperm/losses.hpp"
#include "dperm/types.hpp"

namespace dperm {

// Inputs for the closed-form excess-risk evaluators. The multipliers default
// to 1; absolute levels are order-of-magnitude overlays while scaling checks
// use slope fits, so the unknown constants stay configurable.
struct BoundInput {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double zeta = 0.0;
  int iterations = 0;
  AssumptionConstants constants;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double sigma_constant_c = 2.0;

  // Whether zeta sits inside (exp(-p/8), 1), the interval the tail bound is
  // stated for. The evaluators still compute outside it (several standard
  // verification settings probe small zeta at small p), so this is surfaced
  // as a flag rather than an error.
  bool zeta_in_regime() const;
  void validate() const;
};

// The per-step tail inflation factor (1 + (8 log(T/zeta) / p)^(1/4)).
double noise_tail_factor(int iterations, double zeta, Eigen::Index p);

// Plateau bound on the excess empirical risk for a smooth loss trained with
// constant step 1/L:
//   (1 - mu/L)^T * M  +  sigma^2 p / (2 mu) * factor^2,
// with sigma^2 the calibrated noise variance for (n, eps, delta, T).
double opt_error_bound_smooth(const BoundInput& input, double multiplier = 1.0);

// Excess empirical risk bound for a Hoelder-smooth loss trained with the
// decaying schedule:
//   G'^2 sqrt(p log(1/delta)) / (n^(2 alpha / (1 + 2 alpha)) eps) * factor.
double opt_error_bound_hoelder(const BoundInput& input, double multiplier = 1.0);

// The three excess-population-risk regimes:
//   smooth_const_step:   smooth + curvature, constant 1/L step, T ~ log n
//   hoelder_decaying:    Hoelder + curvature, decaying step, T ~ n^(2/(1+2a))
//   hoelder_normalized:  Hoelder + curvature, normalized steps, T ~ log n
enum class ExcessRiskRegime { kSmoothConstStep, kHoelderDecaying, kHoelderNormalized };

// Three-term closed-form bound for the chosen regime, using multipliers
// c1..c3 from the input.
double excess_risk_bound(ExcessRiskRegime regime, const BoundInput& input);

}  // namespace dperm

#endif  // DPERM_BOUNDS_HPP_
