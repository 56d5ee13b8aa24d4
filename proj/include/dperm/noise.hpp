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

#ifndef DPERM_NOISE_HPP_
#define DPERM_NOISE_HPP_

#include <cstdint>

#include "dperm/rng.hpp"
#include "dperm/types.hpp"

namespace dperm {

struct GaussianSpec {
  double sigma;
  Eigen::Index dim;

  GaussianSpec(double s, Eigen::Index d) : sigma(s), dim(d) {
    if (!(sigma > 0.0)) throw ConfigError("GaussianSpec: sigma must be positive");
    if (dim < 1) throw ConfigError("GaussianSpec: dim must be at least 1");
  }
};

// Vector of independent N(0, sigma^2) coordinates, deterministic in the
// generator state.
ParamVector sample_gaussian(const GaussianSpec& spec, Rng& rng);

// Smallest zeta for which the tail bound below is stated at dimension p.
double zeta_lower_limit(Eigen::Index p);

// High-probability norm bound for an isotropic Gaussian vector:
//   sigma * sqrt(p) * (1 + (8 log(1/zeta) / p)^(1/4)),
// valid with probability at least 1 - zeta for zeta in (exp(-p/8), 1).
// Throws ConcentrationRegimeError outside that interval.
double noise_norm_bound(double sigma, Eigen::Index p, double zeta);

// Same formula without the interval check. Only for probing the formula
// outside its stated regime (the verification suites do this deliberately);
// everything else should call noise_norm_bound.
double noise_norm_bound_unchecked(double sigma, Eigen::Index p, double zeta);

struct ConcentrationCheck {
  double zeta = 0.0;
  long samples = 0;
  double bound_value = 0.0;
  double exceed_fraction = 0.0;
  double mean_norm = 0.0;
  double sigma = 0.0;
  Eigen::Index dim = 0;

  bool holds() const { return exceed_fraction <= zeta; }
};

// Monte-Carlo check of the norm bound: samples `trials` vectors and reports
// the fraction whose norm exceeds the bound. `enforce_regime` may be dropped
// to evaluate grid cells outside the stated zeta interval.
ConcentrationCheck run_concentration_check(const GaussianSpec& spec, double zeta, long trials,
                                           Rng& rng, bool enforce_regime = true);

}  // namespace dperm

#endif  // DPERM_NOISE_HPP_
