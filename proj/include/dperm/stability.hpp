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

#ifndef DPERM_STABILITY_HPP_
#define DPERM_STABILITY_HPP_

#include "dperm/config.hpp"
#include "dperm/losses.hpp"
#include "dperm/optimize.hpp"
#include "dperm/types.hpp"

namespace dperm {

// Two datasets of equal shape differing in exactly one example.
struct AdjacentPair {
  Dataset base;
  Dataset variant;
  Eigen::Index replaced_index = 0;
};

// Replaces the example at `index` with (x, y). When `preprocess` is set the
// replacement row is rescaled to unit norm if needed; otherwise an
// over-norm row is rejected.
AdjacentPair make_adjacent(const Dataset& data, Eigen::Index index,
                           const Eigen::RowVectorXd& x, double y, bool preprocess);

// Parameter-distance bound for models trained on adjacent datasets:
//   2 sqrt(2) sqrt(gap / mu) + 4 G / (mu n),
// where gap is the trained model's excess empirical risk. Tiny negative
// gaps from solver tolerance are clamped to zero.
double stability_bound(double lipschitz, double mu, Eigen::Index n, double empirical_gap);

struct StabilityReport {
  double argument_gap = 0.0;       // || theta_base - theta_variant ||
  double bound_value = 0.0;        // evaluated at max(gap_base, gap_variant)
  double empirical_gap_base = 0.0;
  double empirical_gap_variant = 0.0;
  double minimizer_shift = 0.0;    // || theta*_base - theta*_variant ||
  double minimizer_shift_bound = 0.0;  // 4 G / (mu n)
  bool satisfied = false;
  // Loss-value stability implied by the argument gap and Lipschitz bound.
  double loss_stability = 0.0;
};

// Trains on both sides of the pair (noise streams keyed per the configured
// policy), solves both non-private reference problems, and evaluates the
// bound above.
StabilityReport measure_argument_stability(const AdjacentPair& pair, const RunConfig& config,
                                           const NoisePlan& plan, const LossModel& model,
                                           const AssumptionConstants& constants);

// Builds `count` pairs with both the replaced index and the replacement
// example drawn by seed from a held-out pool.
std::vector<AdjacentPair> sample_adjacent_pairs(const Dataset& data, const Dataset& pool,
                                                int count, uint64_t seed);

}  // namespace dperm

#endif  // DPERM_STABILITY_HPP_
