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

#include "ldpeff/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ldpeff/errors.hpp"
#include "ldpeff/staircase.hpp"

namespace ldpeff {

namespace {

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Grid scan over the clipped parameter interval followed by golden-section
// refinement of the bracket around the best grid point.
double maximize_over_domain(const std::function<double(double)>& f, const ThetaDomain& dom,
                            const MleOptions& options) {
  if (options.grid_points < 3)
    throw std::invalid_argument("MleOptions: need at least 3 grid points");
  const double m = options.margin_frac * dom.width();
  const double lo = dom.lo + m;
  const double hi = dom.hi - m;
  if (!(lo < hi)) throw std::invalid_argument("MleOptions: margin leaves empty interval");
  const int n = options.grid_points;
  double best_value = -std::numeric_limits<double>::infinity();
  int best = 0;
  for (int g = 0; g < n; ++g) {
    const double theta = lo + (hi - lo) * static_cast<double>(g) / (n - 1);
    const double value = f(theta);
    if (value > best_value) {
      best_value = value;
      best = g;
    }
  }
  const double step = (hi - lo) / (n - 1);
  const double a = std::max(lo, lo + (best - 1) * step);
  const double b = std::min(hi, lo + (best + 1) * step);
  return golden_section_max(f, a, b, options.tol);
}

std::vector<std::size_t> count_outputs(std::span<const double> z_labels,
                                       const Channel& channel) {
  std::vector<std::size_t> counts(channel.rows, 0);
  for (double z : z_labels) {
    const int i = channel.output_index(z);
    if (i < 0) throw std::invalid_argument("private_mle: sample outside the channel's outputs");
    ++counts[static_cast<std::size_t>(i)];
  }
  return counts;
}

// Grid check that distinct parameters induce distinct sanitized laws.
void check_identifiable(const Channel& q0, const DiscreteModel& model) {
  const int grid = 101;
  const ThetaDomain& dom = model.theta_domain();
  const double m = 1e-3 * dom.width();
  std::vector<std::vector<double>> laws;
  laws.reserve(grid);
  for (int g = 0; g < grid; ++g) {
    const double theta = dom.lo + m + (dom.width() - 2 * m) * static_cast<double>(g) / (grid - 1);
    const auto p = model.pmf(theta);
    std::vector<double> q(q0.rows, 0.0);
    for (std::size_t i = 0; i < q0.rows; ++i)
      for (std::size_t j = 0; j < q0.cols; ++j) q[i] += q0(i, j) * p[j];
    laws.push_back(std::move(q));
  }
  for (int a = 0; a < grid; ++a)
    for (int b = a + 1; b < grid; ++b) {
      double l1 = 0.0;
      for (std::size_t i = 0; i < laws[a].size(); ++i)
        l1 += std::fabs(laws[a][i] - laws[b][i]);
      if (l1 <= 1e-9)
        throw std::invalid_argument(
            "preliminary channel induces a non-identifiable sanitized model");
    }
}

}  // namespace

double private_mle(std::span<const double> z_labels, const Channel& channel,
                   const DiscreteModel& model, const MleOptions& options) {
  if (z_labels.empty()) throw std::invalid_argument("private_mle: empty sample");
  if (channel.input_labels != model.labels())
    throw std::invalid_argument("private_mle: channel input labels do not match the model");
  const auto counts = count_outputs(z_labels, channel);
  for (std::size_t i = 0; i < channel.rows; ++i) {
    if (counts[i] == 0) continue;
    bool all_zero = true;
    for (std::size_t j = 0; j < channel.cols; ++j)
      if (channel(i, j) != 0.0) {
        all_zero = false;
        break;
      }
    if (all_zero)
      throw std::runtime_error(
          "private_mle: observed an output with an identically zero channel row "
          "(invalid channel for the recorded data)");
  }
  auto log_likelihood = [&](double theta) {
    const auto p = model.pmf(theta);
    double acc = 0.0;
    for (std::size_t i = 0; i < channel.rows; ++i) {
      if (counts[i] == 0) continue;
      double qi = 0.0;
      for (std::size_t j = 0; j < channel.cols; ++j) qi += channel(i, j) * p[j];
      if (qi <= 0.0) return -std::numeric_limits<double>::infinity();
      acc += static_cast<double>(counts[i]) * std::log(qi);
    }
    return acc;
  };
  return maximize_over_domain(log_likelihood, model.theta_domain(), options);
}

double warner_estimator(std::span<const int> z_bits, double alpha) {
  if (z_bits.empty()) throw std::invalid_argument("warner_estimator: empty sample");
  if (!(alpha > 0.0)) throw std::invalid_argument("warner_estimator: alpha must be > 0");
  double sum = 0.0;
  for (int z : z_bits) {
    if (z != 0 && z != 1) throw std::invalid_argument("warner_estimator: samples must be bits");
    sum += z;
  }
  const double zbar = sum / static_cast<double>(z_bits.size());
  const double ealpha = std::exp(alpha);
  return (ealpha + 1.0) / (ealpha - 1.0) * (zbar - 1.0 / (ealpha + 1.0));
}

double method_of_moments(std::span<const std::vector<double>> z_vectors,
                         const LaplaceMechanism& mech, std::span<const double> box_lo,
                         std::span<const double> box_hi,
                         const std::function<double(std::span<const double>)>& f_inverse) {
  if (z_vectors.empty()) throw std::invalid_argument("method_of_moments: empty input");
  if (box_lo.size() != mech.dim || box_hi.size() != mech.dim)
    throw std::invalid_argument("method_of_moments: box dimension mismatch");
  std::vector<double> avg(mech.dim, 0.0);
  for (const auto& z : z_vectors) {
    if (z.size() != mech.dim)
      throw std::invalid_argument("method_of_moments: vector dimension mismatch");
    for (std::size_t i = 0; i < mech.dim; ++i) avg[i] += z[i];
  }
  for (std::size_t i = 0; i < mech.dim; ++i) {
    avg[i] /= static_cast<double>(z_vectors.size());
    avg[i] = std::clamp(avg[i], box_lo[i], box_hi[i]);
  }
  return f_inverse(avg);
}

Channel default_preliminary_channel(const DiscreteModel& model, double alpha) {
  const std::size_t k = model.size();
  Channel q0;
  if (k <= 8) {
    q0 = randomized_response(k, alpha, model.labels());
  } else {
    // Merge the sample space into 8 blocks of roughly equal probability at
    // the domain midpoint, then randomize the block index.
    const ThetaDomain& dom = model.theta_domain();
    const auto p = model.pmf(0.5 * (dom.lo + dom.hi));
    std::vector<int> block(k, 0);
    double acc = 0.0;
    int current = 0;
    for (std::size_t j = 0; j < k; ++j) {
      block[j] = current;
      acc += p[j];
      while (current < 7 && acc >= static_cast<double>(current + 1) / 8.0) ++current;
    }
    q0 = compose_pre(randomized_response(8, alpha), block, model.labels());
  }
  check_identifiable(q0, model);
  return q0;
}

namespace {

struct Schedule {
  std::size_t n = 0, n1 = 0, n2 = 0;
  double eps = 0.0;
};

Schedule resolve_schedule(std::size_t n, const TwoStepConfig& config) {
  if (n < config.min_n) {
    std::ostringstream os;
    os << "two_step_estimate: need at least " << config.min_n << " samples, got " << n;
    throw std::invalid_argument(os.str());
  }
  Schedule s;
  s.n = n;
  s.n1 = config.n1_override
             ? config.n1_override
             : static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), config.n1_exponent)));
  if (s.n1 == 0 || s.n1 >= n)
    throw std::invalid_argument("two_step_estimate: first-group size must satisfy 0 < n1 < n");
  s.n2 = n - s.n1;
  s.eps = (config.eps_override > 0.0) ? config.eps_override
                                      : 1.0 / std::log(static_cast<double>(s.n1) + M_E);
  return s;
}

// Common tail of the pipeline once a finite representation (cell model and
// raw-sample-to-cell map) is fixed: estimate the optimal channel at
// theta_tilde, release group 2 through it, and maximize the likelihood.
TwoStepResult finish_two_step(std::span<const double> x, const DiscreteModel& cell_model,
                              const std::function<double(double)>& to_cell_label,
                              double theta_tilde_raw, const Schedule& sched,
                              const TwoStepConfig& config, SplitMix64& rng,
                              TwoStepResult result) {
  const ThetaDomain& dom = cell_model.theta_domain();
  const double margin = config.clip_margin_frac * dom.width();
  const double theta_tilde =
      std::clamp(theta_tilde_raw, dom.lo + margin, dom.hi - margin);

  const std::size_t k_hat = cell_model.size();
  if (k_hat > kMaxStaircaseInputs) {
    std::ostringstream os;
    os << "two_step_estimate: discretization produced k=" << k_hat << " cells, above the cap of "
       << kMaxStaircaseInputs << "; increase eps";
    throw ResourceLimitError(os.str());
  }
  auto optimal = solve_optimal_mechanism(cell_model, theta_tilde, config.alpha);
  const Channel sampling_channel = strip_zero_rows(optimal.channel);

  std::vector<double> z2;
  z2.reserve(sched.n2);
  for (std::size_t i = sched.n1; i < sched.n; ++i)
    z2.push_back(sample(sampling_channel, to_cell_label(x[i]), rng));
  const double theta_hat = private_mle(z2, sampling_channel, cell_model, config.optimizer);

  result.theta_tilde = theta_tilde;
  result.theta_hat = theta_hat;
  result.k_hat = k_hat;
  result.i_star_hat = fisher_info_private(optimal.channel, cell_model, theta_hat);
  result.log.theta_tilde_raw = theta_tilde_raw;
  result.log.n = sched.n;
  result.log.n1 = sched.n1;
  result.log.n2 = sched.n2;
  result.log.eps = sched.eps;
  result.log.k_hat = k_hat;
  result.log.lp_iterations = optimal.lp_iterations;
  result.log.active_patterns = optimal.active_patterns.size();
  result.log.channel_hat_validated = validate_alpha_dp(optimal.channel, config.alpha).pass;
  result.channel_hat = std::move(optimal.channel);
  return result;
}

}  // namespace

TwoStepResult two_step_estimate(std::span<const double> x_samples,
                                const DiscreteModel& model, const TwoStepConfig& config,
                                SplitMix64& rng) {
  const Schedule sched = resolve_schedule(x_samples.size(), config);
  Channel q0 = config.q0 ? *config.q0 : default_preliminary_channel(model, config.alpha);
  const auto q0_report = validate_alpha_dp(q0, config.alpha);
  if (!q0_report.pass)
    throw std::invalid_argument("two_step_estimate: preliminary channel is not alpha-private: " +
                                q0_report.message);
  if (config.q0) check_identifiable(q0, model);

  std::vector<double> z1;
  z1.reserve(sched.n1);
  for (std::size_t i = 0; i < sched.n1; ++i) z1.push_back(sample(q0, x_samples[i], rng));
  const double theta_tilde_raw = private_mle(z1, q0, model, config.optimizer);

  TwoStepResult result;
  result.log.q0_outputs = q0.rows;
  result.log.q0_validated = q0_report.pass;
  // Finite sample space already: the discretization step is the identity.
  return finish_two_step(x_samples, model, [](double v) { return v; }, theta_tilde_raw,
                         sched, config, rng, std::move(result));
}

TwoStepResult two_step_estimate(std::span<const double> x_samples,
                                const ContinuousModel& model, const TwoStepConfig& config,
                                SplitMix64& rng) {
  const Schedule sched = resolve_schedule(x_samples.size(), config);
  const ThetaDomain& dom = model.theta_domain();

  // Fixed coarse stage-1 representation: 8 cells equiprobable under the
  // midpoint parameter. Outer cell masses come from exact complements.
  constexpr int kPrelimCells = 8;
  const double theta_mid = 0.5 * (dom.lo + dom.hi);
  std::vector<double> edges(kPrelimCells - 1);
  for (int j = 1; j < kPrelimCells; ++j)
    edges[static_cast<std::size_t>(j) - 1] =
        model.quantile(theta_mid, static_cast<double>(j) / kPrelimCells);
  auto coarse_cell = [edges](double x) {
    return static_cast<double>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
  };
  auto cell_masses = [model, edges](double theta, bool derivative) {
    std::vector<double> out(kPrelimCells, 0.0);
    auto f = [&](double x) {
      return derivative ? model.density_dot(theta, x) : model.density(theta, x);
    };
    const double far_right = model.quantile(theta, 1.0 - 1e-14);
    double rest = 0.0;
    for (int j = 1; j < kPrelimCells; ++j) {
      const double a = edges[static_cast<std::size_t>(j) - 1];
      const double b = (j == kPrelimCells - 1) ? std::max(far_right, a) : edges[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(j)] = detail::adaptive_simpson(f, a, b, 1e-10);
      rest += out[static_cast<std::size_t>(j)];
    }
    out[0] = (derivative ? 0.0 : 1.0) - rest;
    return out;
  };
  std::vector<double> coarse_labels(kPrelimCells);
  for (int j = 0; j < kPrelimCells; ++j) coarse_labels[static_cast<std::size_t>(j)] = j;
  DiscreteModel coarse_model(
      model.name() + "|prelim", coarse_labels, dom,
      [cell_masses](double theta) { return cell_masses(theta, false); },
      [cell_masses](double theta) { return cell_masses(theta, true); });

  Channel q0 = config.q0 ? *config.q0
                         : randomized_response(kPrelimCells, config.alpha, coarse_labels);
  const auto q0_report = validate_alpha_dp(q0, config.alpha);
  if (!q0_report.pass)
    throw std::invalid_argument("two_step_estimate: preliminary channel is not alpha-private: " +
                                q0_report.message);
  check_identifiable(q0, coarse_model);

  std::vector<double> z1;
  z1.reserve(sched.n1);
  for (std::size_t i = 0; i < sched.n1; ++i)
    z1.push_back(sample(q0, coarse_cell(x_samples[i]), rng));
  const double theta_tilde_raw = private_mle(z1, q0, coarse_model, config.optimizer);

  const double margin = config.clip_margin_frac * dom.width();
  const double theta_tilde = std::clamp(theta_tilde_raw, dom.lo + margin, dom.hi - margin);
  Discretization disc =
      discretize(model, theta_tilde, DiscretizeOptions{sched.eps, config.alpha, 0.0, 0.0});

  TwoStepResult result;
  result.log.q0_outputs = q0.rows;
  result.log.q0_validated = q0_report.pass;
  result.disc_map = disc.map;
  const DiscretizationMap map = disc.map;
  return finish_two_step(
      x_samples, disc.model,
      [map](double v) { return static_cast<double>(map.cell_of(v)); }, theta_tilde_raw,
      sched, config, rng, std::move(result));
}

TwoStepResult two_step_estimate(std::span<const double> x_samples, const AnyModel& model,
                                const TwoStepConfig& config, SplitMix64& rng) {
  return std::visit(
      [&](const auto& m) { return two_step_estimate(x_samples, m, config, rng); }, model);
}

}  // namespace ldpeff
