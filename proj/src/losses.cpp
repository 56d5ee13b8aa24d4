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

#include "dperm/losses.hpp"

#include <cmath>

namespace dperm {

namespace {

// log(1 + exp(-m)) without overflow for large |m|.
double logistic_loss(double m) {
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

// d/dm log(1 + exp(-m)) = -1 / (1 + exp(m)).
double logistic_slope(double m) { return -1.0 / (1.0 + std::exp(m)); }

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void AssumptionConstants::apply(const ConstantsOverride& ov) {
  if (ov.lipschitz) lipschitz = *ov.lipschitz;
  if (ov.smoothness) smoothness = *ov.smoothness;
  if (ov.hoelder_constant) hoelder_constant = *ov.hoelder_constant;
  if (ov.hoelder_exponent) hoelder_exponent = *ov.hoelder_exponent;
  if (ov.pl_constant) pl_constant = *ov.pl_constant;
  if (ov.loss_bound) loss_bound = *ov.loss_bound;
  if (domain_radius) {
    hoelder_lipschitz = std::max(2.0 * hoelder_constant * *domain_radius, hoelder_constant);
  }
}

LossModel::LossModel(LossSpec spec) : spec_(spec) {
  if (spec_.family == LossFamily::kQNormHinge || spec_.family == LossFamily::kQPowerAbsolute) {
    if (!(spec_.q > 1.0 && spec_.q <= 2.0)) {
      throw ConfigError("LossModel: q must lie in (1, 2]");
    }
    if (spec_.lambda != 0.0) {
      throw ConfigError("LossModel: q-norm families take no regularizer");
    }
  }
  if (spec_.lambda < 0.0) throw ConfigError("LossModel: lambda must be nonnegative");
  if (spec_.mu_override && !(*spec_.mu_override > 0.0)) {
    throw ConfigError("LossModel: configured mu must be positive");
  }
}

void LossModel::check_dims(const ParamVector& theta, Eigen::Index x_dim) const {
  if (theta.size() != x_dim) {
    throw DimensionError("loss: parameter dimension " + std::to_string(theta.size()) +
                         " does not match feature dimension " + std::to_string(x_dim));
  }
}

double LossModel::value(const ParamVector& theta,
                        const Eigen::Ref<const Eigen::RowVectorXd>& x, double y) const {
  check_dims(theta, x.size());
  const double dot = x * theta;
  const double reg = 0.5 * spec_.lambda * theta.squaredNorm();
  switch (spec_.family) {
    case LossFamily::kRegLogistic:
      return logistic_loss(y * dot) + reg;
    case LossFamily::kLeastSquares: {
      const double r = y - dot;
      return r * r + reg;
    }
    case LossFamily::kQNormHinge: {
      const double m = std::max(0.0, 1.0 - y * dot);
      return std::pow(m, spec_.q);
    }
    case LossFamily::kQPowerAbsolute:
      return std::pow(std::fabs(y - dot), spec_.q);
  }
  throw Error("unreachable");
}

ParamVector LossModel::gradient(const ParamVector& theta,
                                const Eigen::Ref<const Eigen::RowVectorXd>& x,
                                double y) const {
  check_dims(theta, x.size());
  const double dot = x * theta;
  switch (spec_.family) {
    case LossFamily::kRegLogistic:
      return (logistic_slope(y * dot) * y) * x.transpose() + spec_.lambda * theta;
    case LossFamily::kLeastSquares:
      return (-2.0 * (y - dot)) * x.transpose() + spec_.lambda * theta;
    case LossFamily::kQNormHinge: {
      const double m = 1.0 - y * dot;
      if (m <= 0.0) return ParamVector::Zero(theta.size());
      return (-spec_.q * std::pow(m, spec_.q - 1.0) * y) * x.transpose();
    }
    case LossFamily::kQPowerAbsolute: {
      const double m = y - dot;
      if (m == 0.0) return ParamVector::Zero(theta.size());
      return (-spec_.q * std::pow(std::fabs(m), spec_.q - 1.0) * sign(m)) * x.transpose();
    }
  }
  throw Error("unreachable");
}

double LossModel::empirical_risk(const ParamVector& theta, const Dataset& data) const {
  ParamVector scratch(theta.size());
  return empirical_risk_and_gradient(theta, data, scratch);
}

double LossModel::empirical_risk_and_gradient(const ParamVector& theta, const Dataset& data,
                                              ParamVector& gradient_out) const {
  if (data.size() == 0) throw DataError("empirical_risk: empty dataset");
  check_dims(theta, data.dim());
  const Eigen::Index n = data.size();
  const Eigen::VectorXd dots = data.features * theta;
  Eigen::VectorXd weights(n);
  double total = 0.0;
  switch (spec_.family) {
    case LossFamily::kRegLogistic:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = data.labels[i] * dots[i];
        total += logistic_loss(m);
        weights[i] = logistic_slope(m) * data.labels[i];
      }
      break;
    case LossFamily::kLeastSquares:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r = data.labels[i] - dots[i];
        total += r * r;
        weights[i] = -2.0 * r;
      }
      break;
    case LossFamily::kQNormHinge:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = 1.0 - data.labels[i] * dots[i];
        if (m > 0.0) {
          total += std::pow(m, spec_.q);
          weights[i] = -spec_.q * std::pow(m, spec_.q - 1.0) * data.labels[i];
        } else {
          weights[i] = 0.0;
        }
      }
      break;
    case LossFamily::kQPowerAbsolute:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = data.labels[i] - dots[i];
        total += std::pow(std::fabs(m), spec_.q);
        weights[i] = m == 0.0 ? 0.0 : -spec_.q * std::pow(std::fabs(m), spec_.q - 1.0) * sign(m);
      }
      break;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  gradient_out = inv_n * (data.features.transpose() * weights);
  double risk = total * inv_n;
  if (spec_.lambda > 0.0) {
    gradient_out += spec_.lambda * theta;
    risk += 0.5 * spec_.lambda * theta.squaredNorm();
  }
  return risk;
}

// Constants assume feature rows of norm <= 1 and parameters confined to the
// ball of radius M_C. Per family, with m_max the largest attainable
// prediction residual or hinge margin:
//
//   logistic:   G = 1 + lambda M_C,   L = 1/4 + lambda
//   least sq.:  G = 2 m_max + lambda M_C,   L = 2 + lambda
//   q-hinge:    G = q m_max^(q-1),  H = q,            alpha = q - 1
//   q-power:    G = q m_max^(q-1),  H = q 2^(2 - q),  alpha = q - 1
//
// The q-power H carries the extra 2^(2-q) because its gradient weight is odd
// around the zero residual, doubling the worst-case swing across the kink.
AssumptionConstants LossModel::derive_constants(const Dataset& data,
                                                double domain_radius) const {
  if (!(domain_radius > 0.0)) throw ConfigError("derive_constants: domain radius must be positive");
  AssumptionConstants c;
  c.domain_radius = domain_radius;
  const double lambda = spec_.lambda;
  const double label_peak =
      data.size() > 0 ? data.labels.cwiseAbs().maxCoeff() : 1.0;
  switch (spec_.family) {
    case LossFamily::kRegLogistic: {
      c.lipschitz = 1.0 + lambda * domain_radius;
      c.smoothness = 0.25 + lambda;
      c.hoelder_constant = *c.smoothness;
      c.hoelder_exponent = 1.0;
      c.loss_bound = logistic_loss(-domain_radius) + 0.5 * lambda * domain_radius * domain_radius;
      break;
    }
    case LossFamily::kLeastSquares: {
      const double m_max = label_peak + domain_radius;
      c.lipschitz = 2.0 * m_max + lambda * domain_radius;
      c.smoothness = 2.0 + lambda;
      c.hoelder_constant = *c.smoothness;
      c.hoelder_exponent = 1.0;
      c.loss_bound = m_max * m_max + 0.5 * lambda * domain_radius * domain_radius;
      break;
    }
    case LossFamily::kQNormHinge: {
      const double m_max = 1.0 + domain_radius;
      c.lipschitz = spec_.q * std::pow(m_max, spec_.q - 1.0);
      c.hoelder_constant = spec_.q;
      c.hoelder_exponent = spec_.q - 1.0;
      if (spec_.q == 2.0) c.smoothness = 2.0;
      c.loss_bound = std::pow(m_max, spec_.q);
      break;
    }
    case LossFamily::kQPowerAbsolute: {
      const double m_max = label_peak + domain_radius;
      c.lipschitz = spec_.q * std::pow(m_max, spec_.q - 1.0);
      c.hoelder_constant = spec_.q * std::pow(2.0, 2.0 - spec_.q);
      c.hoelder_exponent = spec_.q - 1.0;
      if (spec_.q == 2.0) c.smoothness = 2.0;
      c.loss_bound = std::pow(m_max, spec_.q);
      break;
    }
  }
  if (lambda > 0.0) {
    c.pl_constant = lambda;
  } else if (spec_.mu_override) {
    c.pl_constant = *spec_.mu_override;
  }
  c.hoelder_lipschitz = std::max(2.0 * c.hoelder_constant * domain_radius, c.hoelder_constant);
  return c;
}

}  // namespace dperm
