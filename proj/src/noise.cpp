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

namespace dperm {

ParamVector sample_gaussian(const GaussianSpec& spec, Rng& rng) {
  ParamVector out(spec.dim);
  for (Eigen::Index i = 0; i < spec.dim; ++i) {
    out[i] = spec.sigma * rng.next_gaussian();
  }
  return out;
}

double zeta_lower_limit(Eigen::Index p) {
  return std::exp(-static_cast<double>(p) / 8.0);
}

double noise_norm_bound_unchecked(double sigma, Eigen::Index p, double zeta) {
  if (!(sigma > 0.0)) throw ConfigError("noise_norm_bound: sigma must be positive");
  if (p < 1) throw ConfigError("noise_norm_bound: p must be at least 1");
  if (!(zeta > 0.0 && zeta < 1.0)) {
    throw ConcentrationRegimeError("noise_norm_bound: zeta must lie in (0,1)");
  }
  const double pd = static_cast<double>(p);
  const double correction = std::pow(8.0 * std::log(1.0 / zeta) / pd, 0.25);
  return sigma * std::sqrt(pd) * (1.0 + correction);
}

// The lower endpoint is admitted: the formula is continuous there and the
// standard check points sit exactly on it.
double noise_norm_bound(double sigma, Eigen::Index p, double zeta) {
  if (p >= 1 && !(zeta >= zeta_lower_limit(p) && zeta < 1.0)) {
    throw ConcentrationRegimeError(
        "noise_norm_bound: concentration regime violated, zeta must lie in [exp(-p/8), 1)");
  }
  return noise_norm_bound_unchecked(sigma, p, zeta);
}

ConcentrationCheck run_concentration_check(const GaussianSpec& spec, double zeta, long trials,
                                           Rng& rng, bool enforce_regime) {
  if (trials < 1000) throw ConfigError("run_concentration_check: need at least 1000 trials");
  ConcentrationCheck check;
  check.zeta = zeta;
  check.samples = trials;
  check.sigma = spec.sigma;
  check.dim = spec.dim;
  check.bound_value = enforce_regime ? noise_norm_bound(spec.sigma, spec.dim, zeta)
                                     : noise_norm_bound_unchecked(spec.sigma, spec.dim, zeta);
  long exceed = 0;
  double norm_sum = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < spec.dim; ++i) {
      const double v = spec.sigma * rng.next_gaussian();
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    norm_sum += norm;
    if (norm > check.bound_value) ++exceed;
  }
  check.exceed_fraction = static_cast<double>(exceed) / static_cast<double>(trials);
  check.mean_norm = norm_sum / static_cast<double>(trials);
  return check;
}

}  // namespace dperm
