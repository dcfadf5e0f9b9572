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

#ifndef LDPEFF_KERNELS_HPP
#define LDPEFF_KERNELS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ldpeff/rng.hpp"

namespace ldpeff {

/**
 * Markov kernel between finite spaces, stored as a column-stochastic
 * rows x cols matrix: entry (i, j) is the probability of emitting output i
 * given input j. `alpha` is the privacy budget the kernel is declared at.
 *
 * Rows that are entirely zero are permitted in stored matrices (they arise
 * from optimal mechanisms); strip_zero_rows() removes them before sampling.
 * Channels are immutable in practice and safe to share across threads.
 */
struct Channel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> matrix;  // row-major, rows * cols
  double alpha = 0.0;
  std::vector<double> input_labels;   // size cols
  std::vector<double> output_labels;  // size rows

  double operator()(std::size_t i, std::size_t j) const { return matrix[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return matrix[i * cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return {matrix.data() + i * cols, cols};
  }

  int input_index(double label) const;
  int output_index(double label) const;
};

/// Outcome of the privacy validation below. `pass` is true iff the matrix is
/// column-stochastic and every within-row ratio respects the budget.
struct ValidationReport {
  bool pass = true;
  std::string message;
  // First offending coordinates when pass is false.
  std::size_t row = 0;
  std::size_t col_a = 0;
  std::size_t col_b = 0;
};

/// Checks, with absolute tolerance 1e-12, that every column sums to 1 and
/// that matrix(i,j) <= e^alpha * matrix(i,j') for every row i and column
/// pair. Never throws; violations are described in the report.
ValidationReport validate_alpha_dp(std::span<const double> matrix, std::size_t rows,
                                   std::size_t cols, double alpha);

ValidationReport validate_alpha_dp(const Channel& channel);
ValidationReport validate_alpha_dp(const Channel& channel, double alpha);

/// k-ary randomized response: e^alpha / (e^alpha + k - 1) on the diagonal,
/// 1 / (e^alpha + k - 1) elsewhere. Labels default to 0..k-1.
Channel randomized_response(std::size_t k, double alpha, std::vector<double> labels = {});

/// Post-processing T∘Q: matrix product of a column-stochastic T (from Q's
/// output space to a new one) with Q. The result keeps Q's budget.
Channel compose_post(const Channel& t, const Channel& q);

/// Pre-processing Q∘T for a deterministic map T given as indices into Q's
/// input labels: column j of the result is Q's column t_map[j].
Channel compose_pre(const Channel& q, std::span<const int> t_map,
                    std::vector<double> new_input_labels);

/// Draws one output label given the input label; consumes exactly one
/// uniform variate, so sequences are reproducible from the rng state.
double sample(const Channel& channel, double x_label, SplitMix64& rng);

/// Copy without all-zero rows.
Channel strip_zero_rows(const Channel& channel);

/// JSON object {alpha, input_labels, output_labels, matrix} with the matrix
/// row-major. Doubles round-trip bit-exactly (shortest-round-trip decimals).
std::string channel_to_json(const Channel& channel);
Channel channel_from_json(const std::string& text);

/**
 * Truncate-then-perturb release of a k-dimensional moment vector: the input
 * is zeroed unless its l1 norm is at most tau, then iid Laplace noise of
 * scale 2*tau/alpha is added per coordinate.
 */
struct LaplaceMechanism {
  double tau = 1.0;
  double alpha = 1.0;
  std::size_t dim = 1;
  double scale() const { return 2.0 * tau / alpha; }
};

std::vector<double> laplace_sanitize(std::span<const double> g_value,
                                     const LaplaceMechanism& mech, SplitMix64& rng);

}  // namespace ldpeff

#endif  // LDPEFF_KERNELS_HPP
