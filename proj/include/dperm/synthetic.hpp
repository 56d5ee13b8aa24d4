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

#ifndef DPERM_SYNTHETIC_HPP_
#define DPERM_SYNTHETIC_HPP_

#include <optional>
#include <string>

#include "dperm/losses.hpp"
#include "dperm/rng.hpp"
#include "dperm/types.hpp"

namespace dperm {

enum class SyntheticKind { kStronglyConvexQuadratic, kLogisticSeparable, kHoelderRegression };

// Deterministic generator families with a known (or estimable) population
// minimizer, used where excess population risk is reported.
//
//   quadratic:   x uniform on the sphere of radius feature_radius,
//                y = <theta*, x> + label_noise * g          (regression)
//   separable:   x drawn on the sphere and shifted margin * y along the
//                separating direction, labels flipped w.p. flip_probability
//   hoelder:     same regression design, intended for the q-power loss
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kStronglyConvexQuadratic;
  Eigen::Index n = 100;
  Eigen::Index p = 10;
  uint64_t seed = 0;
  double feature_radius = 1.0;
  double theta_scale = 1.0;
  double label_noise = 0.1;
  double margin = 0.5;
  double flip_probability = 0.1;
};

std::string to_string(SyntheticKind k);
SyntheticKind synthetic_kind_from_string(const std::string& s);

// The planted parameter direction theta*.
ParamVector synthetic_direction(const SyntheticSpec& spec);

Dataset generate_synthetic(const SyntheticSpec& spec);

// Extra examples from the same distribution, drawn from a dedicated stream
// so they never overlap the training draw.
Dataset generate_synthetic_population(const SyntheticSpec& spec, Eigen::Index count);

// Excess population risk of theta. Closed form where the design admits one
// (squared loss on the regression designs); otherwise estimated on a held-out
// population of `pool_size` samples with the reference solver run on the
// pool. Returns nullopt when the model/design pair supports neither.
std::optional<double> population_excess_risk(const SyntheticSpec& spec, const LossModel& model,
                                             const ParamVector& theta,
                                             Eigen::Index pool_size = 100000);

}  // namespace dperm

#endif  // DPERM_SYNTHETIC_HPP_
