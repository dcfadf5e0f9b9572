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

#ifndef LDPEFF_ESTIMATORS_HPP
#define LDPEFF_ESTIMATORS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ldpeff/kernels.hpp"
#include "ldpeff/models.hpp"
#include "ldpeff/rng.hpp"

namespace ldpeff {

/// Knobs of the deterministic 1-D likelihood optimizer: a coarse grid over
/// the clipped parameter interval followed by golden-section refinement.
struct MleOptions {
  int grid_points = 200;
  double margin_frac = 1e-3;  // clip [lo, hi] to [lo + m, hi - m], m = frac * width
  double tol = 1e-8;          // final bracket width
};

/// Maximizer of the sanitized-data log-likelihood sum log(row_z . p_theta)
/// over the clipped parameter interval. z_labels must be output labels of
/// the channel; a sampled output whose channel row is identically zero
/// signals an invalid channel and raises NumericError.
double private_mle(std::span<const double> z_labels, const Channel& channel,
                   const DiscreteModel& model, const MleOptions& options = {});

/// Closed-form unbiased estimator for binary randomized response:
/// (e^a + 1)/(e^a - 1) * (mean(z) - 1/(e^a + 1)). Not clipped here.
double warner_estimator(std::span<const int> z_bits, double alpha);

/// Moment estimator from sanitized moment vectors: averages them, clips the
/// average into the coordinate box [box_lo, box_hi] (the closure of the
/// moment range), and applies f_inverse.
double method_of_moments(std::span<const std::vector<double>> z_vectors,
                         const LaplaceMechanism& mech, std::span<const double> box_lo,
                         std::span<const double> box_hi,
                         const std::function<double(std::span<const double>)>& f_inverse);

struct TwoStepConfig {
  double alpha = 1.0;
  double n1_exponent = 0.7;      // n1 = ceil(n^exponent) unless overridden
  std::size_t n1_override = 0;   // 0 = use the exponent rule
  double eps_override = 0.0;     // 0 = use 1 / log(n1 + e)
  double clip_margin_frac = 1e-3;
  std::size_t min_n = 1000;
  MleOptions optimizer;
  std::optional<Channel> q0;     // preliminary mechanism; default built per model
  std::uint64_t seed = 0;        // provenance echo only; draws come from the rng argument
};

struct TwoStepStageLog {
  std::size_t n = 0, n1 = 0, n2 = 0;
  double eps = 0.0;
  std::size_t q0_outputs = 0;
  bool q0_validated = false;
  double theta_tilde_raw = 0.0;  // before clipping
  std::size_t k_hat = 0;
  std::size_t lp_iterations = 0;
  std::size_t active_patterns = 0;
  bool channel_hat_validated = false;
};

struct TwoStepResult {
  double theta_tilde = 0.0;  // clipped preliminary estimate
  double theta_hat = 0.0;    // final maximum-likelihood estimate
  double i_star_hat = 0.0;   // information of the estimated mechanism at theta_hat
  std::size_t k_hat = 0;     // cells of the (estimated) finite sample space
  Channel channel_hat;       // estimated optimal channel over those cells
  std::optional<DiscretizationMap> disc_map;  // present for continuous models
  TwoStepStageLog log;
};

/**
 * Two-step sequentially interactive estimation from raw samples:
 *   1. the first n1 individuals release through the preliminary mechanism,
 *      giving a clipped consistent estimate theta_tilde;
 *   2. a finite representation of the model is fixed (identity for discrete
 *      models, a quantile-window discretization otherwise);
 *   3. the information-optimal channel at theta_tilde is solved for;
 *   4. the remaining n2 individuals release through that channel;
 *   5. theta_hat maximizes the group-2 log-likelihood.
 * Every kernel anyone samples from is alpha-private, and the group-2 kernel
 * depends on group 1 only through theta_tilde.
 */
TwoStepResult two_step_estimate(std::span<const double> x_samples,
                                const DiscreteModel& model, const TwoStepConfig& config,
                                SplitMix64& rng);

TwoStepResult two_step_estimate(std::span<const double> x_samples,
                                const ContinuousModel& model, const TwoStepConfig& config,
                                SplitMix64& rng);

TwoStepResult two_step_estimate(std::span<const double> x_samples, const AnyModel& model,
                                const TwoStepConfig& config, SplitMix64& rng);

/// The preliminary mechanism used when TwoStepConfig::q0 is not set:
/// randomized response on min(k, 8) cells (cells chosen equiprobable under
/// the domain midpoint for large or continuous sample spaces). Checks
/// identifiability of the induced model on a fine grid.
Channel default_preliminary_channel(const DiscreteModel& model, double alpha);

}  // namespace ldpeff

#endif  // LDPEFF_ESTIMATORS_HPP
