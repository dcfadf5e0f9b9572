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

#ifndef LDPEFF_MODELS_HPP
#define LDPEFF_MODELS_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ldpeff {

/// Open parameter interval (lo, hi).
struct ThetaDomain {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double theta) const { return theta > lo && theta < hi; }
  double width() const { return hi - lo; }
};

/**
 * One-parameter family of pmfs on a finite, labeled sample space.
 *
 * `pmf(theta)` is the probability vector p_theta over `labels()` and
 * `pmf_dot(theta)` its derivative in theta, i.e. the vector of
 * score(x) * p_theta(x). Instances are immutable after construction and safe
 * to share across threads; evaluation is a pure function of theta.
 */
class DiscreteModel {
 public:
  using VectorFn = std::function<std::vector<double>(double)>;

  DiscreteModel(std::string name, std::vector<double> labels, ThetaDomain domain,
                VectorFn pmf, VectorFn pmf_dot);

  const std::string& name() const { return name_; }
  const std::vector<double>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const ThetaDomain& theta_domain() const { return domain_; }

  /// p_theta; throws std::domain_error outside the parameter domain.
  std::vector<double> pmf(double theta) const;
  /// d/dtheta p_theta; same domain contract.
  std::vector<double> pmf_dot(double theta) const;

  /// Index of an exact label value, or -1.
  int label_index(double label) const;

 private:
  void require_in_domain(double theta) const;

  std::string name_;
  std::vector<double> labels_;
  ThetaDomain domain_;
  VectorFn pmf_;
  VectorFn pmf_dot_;
};

/// Fisher information of the raw (unsanitized) model at theta:
/// sum over labels with p>0 of pdot^2 / p.
double fisher_info_raw(const DiscreteModel& model, double theta);

/// Bernoulli(theta) on {0,1}, Theta = (0,1).
DiscreteModel bernoulli_model();

/// Binomial(m, theta) on {0..m}, Theta = (0,1). m >= 1.
DiscreteModel binomial_model(int m);

/**
 * Dominated model on a real interval, used as input to discretization.
 * `quantile` is the inverse CDF in the data argument; it locates the compact
 * window that carries all but a prescribed tail mass.
 */
class ContinuousModel {
 public:
  using Fn2 = std::function<double(double, double)>;

  ContinuousModel(std::string name, ThetaDomain domain, Fn2 density, Fn2 density_dot,
                  Fn2 quantile);

  const std::string& name() const { return name_; }
  const ThetaDomain& theta_domain() const { return domain_; }
  double density(double theta, double x) const { return density_(theta, x); }
  double density_dot(double theta, double x) const { return density_dot_(theta, x); }
  double quantile(double theta, double u) const { return quantile_(theta, u); }

 private:
  std::string name_;
  ThetaDomain domain_;
  Fn2 density_;
  Fn2 density_dot_;
  Fn2 quantile_;
};

/// N(theta, sigma^2) location family, Theta = (-10, 10).
ContinuousModel gaussian_location_model(double sigma);

/// Deterministic map from a raw sample point to its cell index.
/// Cell 0 is the tail (everything outside [lo, hi)); cells 1..k are
/// consecutive intervals of equal width covering [lo, hi).
struct DiscretizationMap {
  double lo = 0.0;
  double hi = 0.0;
  int interior_cells = 0;

  int cell_of(double x) const;
  int cells() const { return interior_cells + 1; }
  double cell_width() const { return (hi - lo) / interior_cells; }
};

struct Discretization {
  DiscreteModel model;
  DiscretizationMap map;
};

struct DiscretizeOptions {
  double eps = 0.1;     // Fisher-information tolerance driving the defaults
  double alpha = 1.0;   // privacy budget, enters the default tail mass
  double gamma0 = 0.0;  // tail mass; 0 selects eps/3 * (5 e^{5 alpha})^{-2}
  double delta = 0.0;   // cell diameter; 0 selects the halving rule
  int interior_cells = 0;  // when > 0, overrides delta with window/interior_cells
};

/**
 * Pushforward of a continuous model onto cells {0..k}: cell 0 is the tail of
 * mass <= gamma0 at the construction point, cells 1..k split the quantile
 * window into intervals of length <= delta. Cell probabilities and
 * derivative masses are adaptive-Simpson integrals (abs tol 1e-10 per cell);
 * the tail takes the exact complement, so pmf sums to 1 and pmf_dot to 0 by
 * construction. When delta is not given, it is halved until the Fisher
 * information of the discretized model moves by less than eps.
 */
Discretization discretize(const ContinuousModel& model, double theta,
                          const DiscretizeOptions& options);

using AnyModel = std::variant<DiscreteModel, ContinuousModel>;

/// Parses "bernoulli", "binomial:m", or "gaussian-location:sigma".
AnyModel model_from_spec(const std::string& spec);

const ThetaDomain& theta_domain(const AnyModel& model);

namespace detail {
/// Adaptive Simpson integral of f over [a, b] with absolute tolerance.
/// Throws NumericError when the refinement depth limit is hit.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol);
}  // namespace detail

}  // namespace ldpeff

#endif  // LDPEFF_MODELS_HPP
