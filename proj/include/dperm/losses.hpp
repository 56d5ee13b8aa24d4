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

#ifndef DPERM_LOSSES_HPP_
#define DPERM_LOSSES_HPP_

#include <optional>

#include "dperm/config.hpp"
#include "dperm/types.hpp"

namespace dperm {

// Analytic regularity constants of a loss family over the projected domain
// (parameter ball of radius M_C, feature rows of norm <= 1):
//
//   lipschitz          sup-norm bound G on per-example gradients
//   smoothness         gradient-Lipschitz constant L, absent for exponents < 1
//   hoelder_constant   H with ||grad(a) - grad(b)|| <= H ||a - b||^alpha
//   hoelder_exponent   alpha in (0, 1]
//   pl_constant        curvature constant mu (from L2 regularization, or an
//                      explicitly configured value)
//   loss_bound         upper bound M on loss values over the domain
//   hoelder_lipschitz  max(2 * H * M_C, H), the gradient bound implied by
//                      Hoelder continuity alone
struct AssumptionConstants {
  double lipschitz = 0.0;
  std::optional<double> smoothness;
  double hoelder_constant = 0.0;
  double hoelder_exponent = 1.0;
  std::optional<double> pl_constant;
  std::optional<double> loss_bound;
  double hoelder_lipschitz = 0.0;
  std::optional<double> domain_radius;

  // Second-moment growth constant 2 G^2 / mu implied by the gradient bound
  // together with the curvature constant.
  double bernstein_b() const {
    if (!pl_constant) throw ConfigError("bernstein_b: curvature constant unavailable");
    return 2.0 * lipschitz * lipschitz / *pl_constant;
  }

  void apply(const ConstantsOverride& ov);
};

// A loss family instance: per-example value/gradient, dataset-level risk,
// and derivation of the constants above. All operations are pure.
class LossModel {
 public:
  explicit LossModel(LossSpec spec);

  const LossSpec& spec() const { return spec_; }
  LossFamily family() const { return spec_.family; }
  double lambda() const { return spec_.lambda; }
  double q() const { return spec_.q; }

  double value(const ParamVector& theta, const Eigen::Ref<const Eigen::RowVectorXd>& x,
               double y) const;

  // Where the loss has a kink the gradient is the limit from the inactive
  // side, which is the zero vector for both q-norm families.
  ParamVector gradient(const ParamVector& theta,
                       const Eigen::Ref<const Eigen::RowVectorXd>& x, double y) const;

  double empirical_risk(const ParamVector& theta, const Dataset& data) const;

  // Risk and full-batch gradient in one pass over the data.
  double empirical_risk_and_gradient(const ParamVector& theta, const Dataset& data,
                                     ParamVector& gradient_out) const;

  // Analytic constants for this family on the given data and parameter ball.
  AssumptionConstants derive_constants(const Dataset& data, double domain_radius) const;

 private:
  void check_dims(const ParamVector& theta, Eigen::Index x_dim) const;

  LossSpec spec_;
};

}  // namespace dperm

#endif  // DPERM_LOSSES_HPP_
