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

#ifndef LDPEFF_SIMLAB_HPP
#define LDPEFF_SIMLAB_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldpeff/estimators.hpp"
#include "ldpeff/models.hpp"

namespace ldpeff {

enum class EstimatorKind { TwoStep, Warner, MethodOfMoments, PrivateMle };

EstimatorKind estimator_from_name(const std::string& name);
std::string estimator_name(EstimatorKind kind);

struct SimulationConfig {
  EstimatorKind estimator = EstimatorKind::TwoStep;
  double theta0 = 0.5;
  double alpha = 1.0;
  std::size_t n = 1000;
  std::size_t replications = 100;
  std::uint64_t base_seed = 0;
  int threads = 1;
  double mom_tau = 0.0;  // 0 = max |label| for discrete models
  TwoStepConfig two_step;
};

/// One row per replication; vectors are indexed by replication and filled
/// positionally, so output is independent of scheduling. Fields that an
/// estimator does not produce hold NaN (and 0 for k_hat).
struct SimulationSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<double> theta_tilde;
  std::vector<double> theta_hat;
  std::vector<std::size_t> k_hat;
  std::vector<double> i_star_hat;

  double mean = 0.0;
  double bias = 0.0;
  std::optional<double> var_scaled;  // variance of sqrt(n) * (theta_hat - theta0)
  double var_bound = 0.0;            // 1 / sup-information at (theta0, alpha)
  std::optional<double> ratio;       // var_scaled / var_bound
  double wall_seconds = 0.0;
};

/// Runs `replications` independent replications with per-replication rng
/// streams seeded by mix64(base_seed, r). Any replication error aborts the
/// experiment with the failing seed in the message.
SimulationSummary run_experiment(const AnyModel& model, const SimulationConfig& config);

/// CSV with header rep,seed,theta_tilde,theta_hat,k_hat,i_star_hat and
/// doubles printed with 17 significant digits.
void write_replications_csv(const SimulationSummary& summary, std::ostream& out);

/// Summary JSON (schema documented in the README).
std::string summary_to_json(const SimulationConfig& config,
                            const SimulationSummary& summary);

struct BoundRow {
  double theta = 0.0;
  double alpha = 0.0;
  double i_star = 0.0;
  double var_bound = 0.0;  // 1 / i_star
  double i_raw = 0.0;
  double i_rr = 0.0;  // randomized-response baseline
};

/// Optimal-information table over a (theta, alpha) grid. Continuous models
/// are discretized at each theta: a fixed 16-cell quantile window by
/// default, or the adaptive halving rule when eps > 0.
std::vector<BoundRow> bound_table(const AnyModel& model,
                                  std::span<const double> theta_grid,
                                  std::span<const double> alpha_grid,
                                  double eps = 0.0);

void write_bound_table_csv(std::span<const BoundRow> rows, std::ostream& out);

/// Theoretical variance bound 1/I* at (theta0, alpha); continuous models are
/// discretized with the default two-step tolerance at first-group size n1(n).
double variance_bound(const AnyModel& model, double theta0, double alpha, std::size_t n);

}  // namespace ldpeff

#endif  // LDPEFF_SIMLAB_HPP
