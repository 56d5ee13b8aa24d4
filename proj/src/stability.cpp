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

#include "dperm/stability.hpp"

#include <cmath>

namespace dperm {

AdjacentPair make_adjacent(const Dataset& data, Eigen::Index index,
                           const Eigen::RowVectorXd& x, double y, bool preprocess) {
  if (index < 0 || index >= data.size()) {
    throw DataError("make_adjacent: index " + std::to_string(index) + " out of range");
  }
  if (x.size() != data.dim()) {
    throw DimensionError("make_adjacent: replacement dimension mismatch");
  }
  Eigen::RowVectorXd row = x;
  const double norm = row.norm();
  if (norm > 1.0 + 1e-9) {
    if (!preprocess) throw DataError("make_adjacent: replacement row exceeds unit norm");
    row /= norm;
  }
  AdjacentPair pair;
  pair.base = data;
  pair.variant = data;
  pair.variant.features.row(index) = row;
  pair.variant.labels[index] = y;
  pair.variant.validate();
  pair.replaced_index = index;
  return pair;
}

double stability_bound(double lipschitz, double mu, Eigen::Index n, double empirical_gap) {
  if (!(mu > 0.0)) throw ConfigError("stability_bound: PL constant unavailable");
  if (!(lipschitz > 0.0)) throw ConfigError("stability_bound: Lipschitz constant unavailable");
  if (n < 1) throw ConfigError("stability_bound: n must be positive");
  const double gap = std::max(0.0, empirical_gap);
  return 2.0 * std::sqrt(2.0) * std::sqrt(gap / mu) +
         4.0 * lipschitz / (mu * static_cast<double>(n));
}

StabilityReport measure_argument_stability(const AdjacentPair& pair, const RunConfig& config,
                                           const NoisePlan& plan, const LossModel& model,
                                           const AssumptionConstants& constants) {
  if (!constants.pl_constant) {
    throw ConfigError("measure_argument_stability: PL constant unavailable");
  }

  RunConfig base_config = config;
  RunConfig variant_config = config;
  if (config.noise_policy == NoiseStreamPolicy::kIndependent) {
    // Distinct salts decouple the two noise sequences; the shared policy
    // reuses one salt and the hash policy derives it from each dataset.
    base_config.noise_salt = streams::kNoiseSaltDefault + config.noise_salt;
    variant_config.noise_salt = streams::kNoiseSaltVariant + config.noise_salt;
  }

  const ParamVector theta0 = ParamVector::Zero(pair.base.dim());
  const TrainTrace base_trace = train(base_config, plan, model, pair.base, theta0, constants);
  const TrainTrace variant_trace =
      train(variant_config, plan, model, pair.variant, theta0, constants);

  const Minimizer base_min = solve_nonprivate(model, pair.base, config.oracle_tolerance,
                                              config.oracle_max_iterations,
                                              config.projection_enabled ? config.projection_radius
                                                                        : std::nullopt);
  const Minimizer variant_min = solve_nonprivate(model, pair.variant, config.oracle_tolerance,
                                                 config.oracle_max_iterations,
                                                 config.projection_enabled
                                                     ? config.projection_radius
                                                     : std::nullopt);

  StabilityReport report;
  report.argument_gap = (base_trace.final_params - variant_trace.final_params).norm();
  report.empirical_gap_base =
      model.empirical_risk(base_trace.final_params, pair.base) - base_min.risk;
  report.empirical_gap_variant =
      model.empirical_risk(variant_trace.final_params, pair.variant) - variant_min.risk;
  const double gap = std::max(report.empirical_gap_base, report.empirical_gap_variant);
  const double mu = *constants.pl_constant;
  report.bound_value = stability_bound(constants.lipschitz, mu, pair.base.size(), gap);
  report.minimizer_shift = (base_min.theta - variant_min.theta).norm();
  report.minimizer_shift_bound =
      4.0 * constants.lipschitz / (mu * static_cast<double>(pair.base.size()));
  report.satisfied = report.argument_gap <= report.bound_value;
  report.loss_stability = constants.lipschitz * report.argument_gap;
  return report;
}

std::vector<AdjacentPair> sample_adjacent_pairs(const Dataset& data, const Dataset& pool,
                                                int count, uint64_t seed) {
  if (pool.size() < 1) throw DataError("sample_adjacent_pairs: empty replacement pool");
  if (pool.dim() != data.dim()) {
    throw DimensionError("sample_adjacent_pairs: pool dimension mismatch");
  }
  Rng rng(seed, streams::kReplacementPool);
  std::vector<AdjacentPair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto index =
        static_cast<Eigen::Index>(rng.next_u64() % static_cast<uint64_t>(data.size()));
    const auto source =
        static_cast<Eigen::Index>(rng.next_u64() % static_cast<uint64_t>(pool.size()));
    pairs.push_back(make_adjacent(data, index, pool.features.row(source), pool.labels[source],
                                  /*preprocess=*/true));
  }
  return pairs;
}

}  // namespace dperm
