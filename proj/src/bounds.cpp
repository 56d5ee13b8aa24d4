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

#include "dperm/bounds.hpp"

#include <cmath>

#include "dperm/noise.hpp"

namespace dperm {

bool BoundInput::zeta_in_regime() const {
  return zeta > zeta_lower_limit(p) && zeta < 1.0;
}

void BoundInput::validate() const {
  if (n < 2) throw ConfigError("BoundInput: n must be at least 2");
  if (p < 1) throw ConfigError("BoundInput: p must be at least 1");
  if (!(epsilon > 0.0)) throw ConfigError("BoundInput: epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("BoundInput: delta must lie in (0,1)");
  if (!(zeta > 0.0 && zeta < 1.0)) throw ConfigError("BoundInput: zeta must lie in (0,1)");
  if (iterations < 1) throw ConfigError("BoundInput: iterations must be positive");
  if (!(sigma_constant_c > 0.0)) throw ConfigError("BoundInput: sigma constant must be positive");
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) {
    throw ConfigError("BoundInput: multipliers must be positive");
  }
}

double noise_tail_factor(int iterations, double zeta, Eigen::Index p) {
  const double ratio = static_cast<double>(iterations) / zeta;
  return 1.0 + std::pow(8.0 * std::log(ratio) / static_cast<double>(p), 0.25);
}

namespace {

double calibrated_sigma_squared(const BoundInput& in, double g_eff) {
  const double nd = static_cast<double>(in.n);
  return in.sigma_constant_c * g_eff * g_eff * static_cast<double>(in.iterations) *
         std::log(1.0 / in.delta) / (nd * nd * in.epsilon * in.epsilon);
}

double require_mu(const BoundInput& in) {
  if (!in.constants.pl_constant) throw ConfigError("bound: PL constant unavailable");
  return *in.constants.pl_constant;
}

double hoelder_lipschitz(const BoundInput& in) {
  if (!(in.constants.hoelder_lipschitz > 0.0)) {
    throw ConfigError("bound: Hoelder gradient bound unavailable");
  }
  return in.constants.hoelder_lipschitz;
}

}  // namespace

double opt_error_bound_smooth(const BoundInput& in, double multiplier) {
  in.validate();
  if (!in.constants.smoothness) throw ConfigError("opt_error_bound_smooth: L unavailable");
  const double mu = require_mu(in);
  const double contraction = 1.0 - mu / *in.constants.smoothness;
  if (!(contraction >= 0.0 && contraction < 1.0)) {
    throw ConfigError("opt_error_bound_smooth: need 0 < mu <= L");
  }
  const double start_gap = in.constants.loss_bound ? *in.constants.loss_bound : 0.0;
  const double factor = noise_tail_factor(in.iterations, in.zeta, in.p);
  const double sigma_sq = calibrated_sigma_squared(in, in.constants.lipschitz);
  const double plateau =
      sigma_sq * static_cast<double>(in.p) / (2.0 * mu) * factor * factor;
  return multiplier * (std::pow(contraction, in.iterations) * start_gap + plateau);
}

double opt_error_bound_hoelder(const BoundInput& in, double multiplier) {
  in.validate();
  const double g_prime = hoelder_lipschitz(in);
  const double alpha = in.constants.hoelder_exponent;
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("opt_error_bound_hoelder: alpha must lie in (0,1]");
  }
  const double factor = noise_tail_factor(in.iterations, in.zeta, in.p);
  const double n_exponent = 2.0 * alpha / (1.0 + 2.0 * alpha);
  return multiplier * g_prime * g_prime *
         std::sqrt(static_cast<double>(in.p) * std::log(1.0 / in.delta)) /
         (std::pow(static_cast<double>(in.n), n_exponent) * in.epsilon) * factor;
}

double excess_risk_bound(ExcessRiskRegime regime, const BoundInput& in) {
  in.validate();
  const double nd = static_cast<double>(in.n);
  const double pd = static_cast<double>(in.p);
  const double log_n = std::log(nd);
  const double log_inv_delta = std::log(1.0 / in.delta);
  const double factor = noise_tail_factor(in.iterations, in.zeta, in.p);
  switch (regime) {
    case ExcessRiskRegime::kSmoothConstStep: {
      const double g = in.constants.lipschitz;
      return in.c1 * g * std::pow(log_n, 1.5) * std::sqrt(pd * log_inv_delta) /
                 (nd * in.epsilon) * factor +
             in.c2 * g * g * pd * log_n * log_inv_delta /
                 (nd * nd * in.epsilon * in.epsilon) * factor * factor +
             in.c3 * log_n / nd;
    }
    case ExcessRiskRegime::kHoelderDecaying: {
      const double gp = hoelder_lipschitz(in);
      const double alpha = in.constants.hoelder_exponent;
      const double exp1 = alpha / (1.0 + 2.0 * alpha);
      return in.c1 * gp * log_n * std::pow(pd * log_inv_delta, 0.25) /
                 (std::pow(nd, exp1) * std::sqrt(in.epsilon)) * std::sqrt(factor) +
             in.c2 * gp * gp * std::sqrt(pd * log_inv_delta) /
                 (std::pow(nd, 2.0 * exp1) * in.epsilon) * factor +
             in.c3 * log_n / nd;
    }
    case ExcessRiskRegime::kHoelderNormalized: {
      const double gp = hoelder_lipschitz(in);
      return in.c1 * gp * std::pow(log_n, 1.5) * std::sqrt(pd * log_inv_delta) /
                 (nd * in.epsilon) * factor +
             in.c2 * gp * gp * log_n * pd * log_inv_delta /
                 (nd * nd * in.epsilon * in.epsilon) * factor * factor +
             in.c3 * log_n / nd;
    }
  }
  throw Error("unreachable");
}

}  // namespace dperm
