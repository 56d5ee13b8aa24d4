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

#include "dperm/synthetic.hpp"

#include <cmath>

#include "dperm/optimize.hpp"

namespace dperm {

namespace {

ParamVector sphere_point(Rng& rng, Eigen::Index p, double radius) {
  ParamVector v(p);
  double sq = 0.0;
  do {
    for (Eigen::Index i = 0; i < p; ++i) v[i] = rng.next_gaussian();
    sq = v.squaredNorm();
  } while (sq == 0.0);
  return v * (radius / std::sqrt(sq));
}

Dataset generate_impl(const SyntheticSpec& spec, uint64_t stream) {
  if (spec.n < 2 || spec.p < 1) throw ConfigError("synthetic: need n >= 2 and p >= 1");
  if (!(spec.feature_radius > 0.0 && spec.feature_radius <= 1.0)) {
    throw ConfigError("synthetic: feature radius must lie in (0, 1]");
  }
  Rng rng(spec.seed, stream);
  const ParamVector direction = synthetic_direction(spec);
  Dataset data;
  data.features.resize(spec.n, spec.p);
  data.labels.resize(spec.n);
  data.name = to_string(spec.kind);

  switch (spec.kind) {
    case SyntheticKind::kStronglyConvexQuadratic:
    case SyntheticKind::kHoelderRegression: {
      data.task = Task::kRegression;
      for (Eigen::Index i = 0; i < spec.n; ++i) {
        const ParamVector x = sphere_point(rng, spec.p, spec.feature_radius);
        data.features.row(i) = x.transpose();
        data.labels[i] = direction.dot(x) + spec.label_noise * rng.next_gaussian();
      }
      break;
    }
    case SyntheticKind::kLogisticSeparable: {
      data.task = Task::kClassification;
      const ParamVector unit = direction / direction.norm();
      const double scale = 1.0 / (spec.feature_radius + spec.margin);
      for (Eigen::Index i = 0; i < spec.n; ++i) {
        ParamVector x = sphere_point(rng, spec.p, spec.feature_radius);
        double y = unit.dot(x) >= 0.0 ? 1.0 : -1.0;
        if (rng.next_double() < spec.flip_probability) y = -y;
        x = (x + spec.margin * y * unit) * scale;
        data.features.row(i) = x.transpose();
        data.labels[i] = y;
      }
      break;
    }
  }
  data.validate();
  return data;
}

}  // namespace

std::string to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::kStronglyConvexQuadratic: return "quadratic";
    case SyntheticKind::kLogisticSeparable: return "separable";
    case SyntheticKind::kHoelderRegression: return "hoelder_regression";
  }
  return "?";
}

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "quadratic") return SyntheticKind::kStronglyConvexQuadratic;
  if (s == "separable") return SyntheticKind::kLogisticSeparable;
  if (s == "hoelder_regression") return SyntheticKind::kHoelderRegression;
  throw ConfigError("synthetic: unknown kind '" + s + "'");
}

ParamVector synthetic_direction(const SyntheticSpec& spec) {
  ParamVector direction = ParamVector::Ones(spec.p);
  return direction * (spec.theta_scale / direction.norm());
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  return generate_impl(spec, streams::kGeneric);
}

Dataset generate_synthetic_population(const SyntheticSpec& spec, Eigen::Index count) {
  SyntheticSpec pool = spec;
  pool.n = count;
  return generate_impl(pool, streams::kSyntheticPopulation);
}

std::optional<double> population_excess_risk(const SyntheticSpec& spec, const LossModel& model,
                                             const ParamVector& theta, Eigen::Index pool_size) {
  const bool regression_design = spec.kind != SyntheticKind::kLogisticSeparable;
  const ParamVector planted = synthetic_direction(spec);

  // Squared loss on the regression designs: E[x x^T] = r^2/p I on the sphere,
  // so the excess risk is (r^2/p) ||theta - theta*||^2 plus the ridge terms.
  if (regression_design && model.family() == LossFamily::kLeastSquares &&
      model.lambda() == 0.0) {
    const double second_moment =
        spec.feature_radius * spec.feature_radius / static_cast<double>(spec.p);
    return second_moment * (theta - planted).squaredNorm();
  }

  const Dataset pool = generate_synthetic_population(spec, pool_size);
  Minimizer star;
  try {
    star = solve_nonprivate(model, pool, 1e-8, 500000);
  } catch (const OracleError&) {
    return std::nullopt;
  }
  return model.empirical_risk(theta, pool) - star.risk;
}

}  // namespace dperm
