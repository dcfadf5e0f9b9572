// Copyright 2026 The ldpeff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPEFF_STAIRCASE_HPP
#define LDPEFF_STAIRCASE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ldpeff/fisher.hpp"
#include "ldpeff/kernels.hpp"
#include "ldpeff/models.hpp"

namespace ldpeff {

/// Hard cap on the number of inputs k: the pattern space has 2^k columns.
inline constexpr std::size_t kMaxStaircaseInputs = 20;

/// Subset S of inputs encoded as a bitmask. Its row direction v_S takes the
/// value e^alpha on S and 1 elsewhere; these directions generate the cone of
/// admissible channel rows.
struct StaircasePattern {
  std::uint32_t mask = 0;
  std::vector<double> direction(std::size_t k, double alpha) const;
};

/// All 2^k subset patterns in mask order (including the empty and full sets,
/// whose objective value is zero). Throws ResourceLimitError above the cap,
/// with advice to coarsen the discretization.
std::vector<StaircasePattern> enumerate_patterns(std::size_t k, double alpha);

struct OptimalMechanismResult {
  Channel channel;        // at most k nonzero rows, labels = model labels
  double i_star = 0.0;    // maximal Fisher information over valid channels
  std::vector<std::uint32_t> active_patterns;  // masks of the kept rows
  std::size_t lp_iterations = 0;
};

/**
 * Exact maximization of the privatized Fisher information over all
 * alpha-private channels on the model's (finite) sample space.
 *
 * Formulated as a linear program over pattern weights t_S >= 0: maximize
 * sum_S t_S * g_theta(v_S) subject to sum_S t_S * v_S = 1 (one equation per
 * input). Solved by a dense revised simplex with Bland's rule, starting from
 * the always-feasible singleton (randomized-response) basis. A basic optimum
 * has at most k active patterns, so the returned channel has at most k rows.
 */
OptimalMechanismResult solve_optimal_mechanism(const DiscreteModel& model, double theta,
                                               double alpha);

/// Smallest-radius threshold c in [0, 1/2) such that the three-row symmetric
/// mechanism beats the two-row ones exactly on (1/2 - c, 1/2 + c) for the
/// Binomial(2, .) model; c == 0 iff alpha <= log 3. Found by bisection on
/// the crossing of the two candidate information curves.
double binomial2_threshold(double alpha);

/// The regime-appropriate closed-form optimal channel for Binomial(2, theta).
Channel binomial2_reference(double theta, double alpha);

struct RegimeRow {
  double theta = 0.0;
  double i_star = 0.0;
  double i_rr = 0.0;    // k-ary randomized-response baseline
  double ratio = 0.0;   // i_rr / i_star
  std::vector<std::uint32_t> active_patterns;
};

/// Optimal value vs. randomized-response baseline along a theta grid.
std::vector<RegimeRow> regime_map(const DiscreteModel& model,
                                  std::span<const double> theta_grid, double alpha);

}  // namespace ldpeff

#endif  // LDPEFF_STAIRCASE_HPP
