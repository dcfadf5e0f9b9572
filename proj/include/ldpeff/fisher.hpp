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

#ifndef LDPEFF_FISHER_HPP
#define LDPEFF_FISHER_HPP

#include <span>
#include <vector>

#include "ldpeff/kernels.hpp"
#include "ldpeff/models.hpp"

namespace ldpeff {

/// Per-output score of a privatized model: t[z] is the conditional mean of
/// the raw score given output z, q[z] the output pmf. The variance of t
/// under q equals the Fisher information of the privatized model.
struct PrivateScoreTable {
  std::vector<double> t;
  std::vector<double> q;
  double variance() const;
};

/// Row functional (v . pdot)^2 / (v . p), with value 0 whenever v . p == 0.
/// v must be entrywise nonnegative. Convex and positively homogeneous in v.
double g_theta(std::span<const double> v, std::span<const double> p,
               std::span<const double> pdot);

/// Fisher information of the privatized model: the sum of g_theta over the
/// channel's rows. Satisfies 0 <= result <= fisher_info_raw(model, theta).
double fisher_info_private(const Channel& channel, const DiscreteModel& model,
                           double theta);

PrivateScoreTable private_score(const Channel& channel, const DiscreteModel& model,
                                double theta);

/// Uniform-in-channel continuity bound: for every valid channel Q,
/// |I_theta(QP) - I_theta'(QP)| <= continuity_bound(model, theta, theta', alpha).
double continuity_bound(const DiscreteModel& model, double theta, double theta_prime,
                        double alpha);

}  // namespace ldpeff

#endif  // LDPEFF_FISHER_HPP
