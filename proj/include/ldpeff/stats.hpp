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

#ifndef LDPEFF_STATS_HPP
#define LDPEFF_STATS_HPP

#include <span>
#include <vector>

namespace ldpeff {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS 241, ~1e-15 accurate). u in (0,1).
double normal_quantile(double u);

/// Upper tail P(chi2_df > x), via the regularized incomplete gamma function.
double chi_square_sf(double x, double df);

struct AndersonDarlingResult {
  double a_squared = 0.0;
  double p_value = 0.0;
};

/// Anderson-Darling test of the fully specified hypothesis N(0,1).
/// The p-value uses the Marsaglia & Marsaglia (2004) evaluation of the
/// A^2 distribution with their finite-n correction.
AndersonDarlingResult anderson_darling_normal(std::span<const double> sample);

/// Unbiased sample variance (denominator n-1). Requires n >= 2.
double sample_variance(std::span<const double> x);

double mean(std::span<const double> x);

}  // namespace ldpeff

#endif  // LDPEFF_STATS_HPP
