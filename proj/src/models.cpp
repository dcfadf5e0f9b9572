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

#include "ldpeff/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldpeff/errors.hpp"
#include "ldpeff/stats.hpp"

namespace ldpeff {

namespace {

double binomial_coefficient(int m, int x) {
  double c = 1.0;
  for (int i = 0; i < x; ++i) c = c * static_cast<double>(m - i) / static_cast<double>(i + 1);
  return c;
}

}  // namespace

DiscreteModel::DiscreteModel(std::string name, std::vector<double> labels,
                             ThetaDomain domain, VectorFn pmf, VectorFn pmf_dot)
    : name_(std::move(name)),
      labels_(std::move(labels)),
      domain_(domain),
      pmf_(std::move(pmf)),
      pmf_dot_(std::move(pmf_dot)) {
  if (labels_.empty()) throw std::invalid_argument("DiscreteModel: empty label set");
  if (!(domain_.lo < domain_.hi))
    throw std::invalid_argument("DiscreteModel: parameter domain must have lo < hi");
  // Probe the midpoint once so broken callbacks fail at construction.
  const double mid = 0.5 * (domain_.lo + domain_.hi);
  const auto p = pmf_(mid);
  const auto pd = pmf_dot_(mid);
  if (p.size() != labels_.size() || pd.size() != labels_.size())
    throw std::invalid_argument("DiscreteModel: pmf size does not match labels");
  double sum = 0.0, dsum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-12) throw std::invalid_argument("DiscreteModel: negative pmf entry");
    sum += p[i];
    dsum += pd[i];
  }
  if (std::fabs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("DiscreteModel: pmf does not sum to 1 at the midpoint");
  if (std::fabs(dsum) > 1e-8)
    throw std::invalid_argument("DiscreteModel: pmf_dot does not sum to 0 at the midpoint");
}

void DiscreteModel::require_in_domain(double theta) const {
  if (!domain_.contains(theta)) {
    std::ostringstream os;
    os << "model '" << name_ << "': theta=" << theta << " outside (" << domain_.lo << ", "
       << domain_.hi << ")";
    throw std::domain_error(os.str());
  }
}

std::vector<double> DiscreteModel::pmf(double theta) const {
  require_in_domain(theta);
  return pmf_(theta);
}

std::vector<double> DiscreteModel::pmf_dot(double theta) const {
  require_in_domain(theta);
  return pmf_dot_(theta);
}

int DiscreteModel::label_index(double label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return static_cast<int>(i);
  return -1;
}

double fisher_info_raw(const DiscreteModel& model, double theta) {
  const auto p = model.pmf(theta);
  const auto pd = model.pmf_dot(theta);
  double info = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) info += pd[i] * pd[i] / p[i];
  return info;
}

DiscreteModel bernoulli_model() { return binomial_model(1); }

DiscreteModel binomial_model(int m) {
  if (m < 1) throw std::invalid_argument("binomial_model: m must be >= 1");
  std::vector<double> labels(static_cast<std::size_t>(m) + 1);
  for (int x = 0; x <= m; ++x) labels[static_cast<std::size_t>(x)] = x;
  auto pmf = [m](double theta) {
    std::vector<double> p(static_cast<std::size_t>(m) + 1);
    for (int x = 0; x <= m; ++x)
      p[static_cast<std::size_t>(x)] =
          binomial_coefficient(m, x) * std::pow(theta, x) * std::pow(1.0 - theta, m - x);
    return p;
  };
  // d/dtheta of C(m,x) theta^x (1-theta)^(m-x); the endpoint powers need the
  // 0^0 = 1 convention, so the two terms are spelled out.
  auto pmf_dot = [m](double theta) {
    std::vector<double> d(static_cast<std::size_t>(m) + 1);
    for (int x = 0; x <= m; ++x) {
      const double c = binomial_coefficient(m, x);
      double term1 = 0.0, term2 = 0.0;
      if (x >= 1) term1 = c * x * std::pow(theta, x - 1) * std::pow(1.0 - theta, m - x);
      if (m - x >= 1) term2 = c * (m - x) * std::pow(theta, x) * std::pow(1.0 - theta, m - x - 1);
      d[static_cast<std::size_t>(x)] = term1 - term2;
    }
    return d;
  };
  std::string name = (m == 1) ? "bernoulli" : ("binomial:" + std::to_string(m));
  return DiscreteModel(std::move(name), std::move(labels), ThetaDomain{0.0, 1.0},
                       std::move(pmf), std::move(pmf_dot));
}

ContinuousModel::ContinuousModel(std::string name, ThetaDomain domain, Fn2 density,
                                 Fn2 density_dot, Fn2 quantile)
    : name_(std::move(name)),
      domain_(domain),
      density_(std::move(density)),
      density_dot_(std::move(density_dot)),
      quantile_(std::move(quantile)) {
  if (!(domain_.lo < domain_.hi))
    throw std::invalid_argument("ContinuousModel: parameter domain must have lo < hi");
}

ContinuousModel gaussian_location_model(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_location_model: sigma must be > 0");
  const double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  auto density = [sigma, inv_norm](double theta, double x) {
    const double z = (x - theta) / sigma;
    return inv_norm * std::exp(-0.5 * z * z);
  };
  auto density_dot = [sigma, density](double theta, double x) {
    return density(theta, x) * (x - theta) / (sigma * sigma);
  };
  auto quantile = [sigma](double theta, double u) {
    return theta + sigma * normal_quantile(u);
  };
  std::ostringstream name;
  name << "gaussian-location:" << sigma;
  // The location domain scales with sigma so the coarse preliminary grid can
  // tell all parameters in it apart.
  return ContinuousModel(name.str(), ThetaDomain{-5.0 * sigma, 5.0 * sigma},
                         std::move(density), std::move(density_dot), std::move(quantile));
}

namespace detail {

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b,
                       double fa, double fm, double fb, double whole, double tol,
                       int depth) {
  if (depth > 40)
    throw NumericError("adaptive_simpson: refinement depth exceeded on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "]");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(fa, flm, fm, m - a);
  const double right = simpson_rule(fm, frm, fb, b - m);
  if (std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson_rule(fa, fm, fb, b - a);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, 0);
}

}  // namespace detail

int DiscretizationMap::cell_of(double x) const {
  if (!(x >= lo) || !(x < hi)) return 0;
  const double w = cell_width();
  int idx = static_cast<int>(std::floor((x - lo) / w));
  idx = std::clamp(idx, 0, interior_cells - 1);
  return idx + 1;
}

namespace {

constexpr double kCellQuadTol = 1e-10;

DiscreteModel build_cell_model(const ContinuousModel& model, const DiscretizationMap& map,
                               std::string name) {
  const int k = map.interior_cells;
  std::vector<double> labels(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) labels[static_cast<std::size_t>(j)] = j;
  const double lo = map.lo;
  const double width = map.cell_width();

  // Interior cell masses by quadrature; the tail takes the exact complement,
  // so the pmf sums to 1 and the derivative masses to 0 identically in theta.
  auto integrate_cells = [model, k, lo, width](double theta, bool derivative) {
    std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      const double a = lo + j * width;
      const double b = lo + (j + 1) * width;
      auto f = [&](double x) {
        return derivative ? model.density_dot(theta, x) : model.density(theta, x);
      };
      const double mass = detail::adaptive_simpson(f, a, b, kCellQuadTol);
      out[static_cast<std::size_t>(j) + 1] = mass;
      total += mass;
    }
    if (derivative) {
      out[0] = -total;
    } else {
      double tail = 1.0 - total;
      if (tail < -1e-8)
        throw NumericError("discretize: interior mass exceeds 1 beyond quadrature error");
      if (tail < 0.0) {
        // Push the rounding excess into the largest cell to keep exact mass 1.
        auto it = std::max_element(out.begin() + 1, out.end());
        *it += tail;
        tail = 0.0;
      }
      out[0] = tail;
    }
    return out;
  };

  auto pmf = [integrate_cells](double theta) { return integrate_cells(theta, false); };
  auto pmf_dot = [integrate_cells](double theta) { return integrate_cells(theta, true); };
  return DiscreteModel(std::move(name), std::move(labels), model.theta_domain(),
                       std::move(pmf), std::move(pmf_dot));
}

}  // namespace

Discretization discretize(const ContinuousModel& model, double theta,
                          const DiscretizeOptions& options) {
  if (!model.theta_domain().contains(theta))
    throw std::domain_error("discretize: theta outside the parameter domain");
  if (!(options.eps > 0.0)) throw std::invalid_argument("discretize: eps must be > 0");
  double gamma0 = options.gamma0;
  if (gamma0 == 0.0) {
    const double f = 5.0 * std::exp(5.0 * options.alpha);
    gamma0 = options.eps / 3.0 / (f * f);
  }
  if (!(gamma0 > 0.0 && gamma0 < 1.0))
    throw std::invalid_argument("discretize: gamma0 must lie in (0,1)");
  if (options.delta < 0.0) throw std::invalid_argument("discretize: delta must be >= 0");
  if (options.interior_cells < 0)
    throw std::invalid_argument("discretize: interior_cells must be >= 0");

  const double lo = model.quantile(theta, gamma0 / 2.0);
  const double hi = model.quantile(theta, 1.0 - gamma0 / 2.0);
  if (!(hi > lo)) throw NumericError("discretize: degenerate quantile window");

  auto make = [&](double delta) {
    const int k = std::max(1, static_cast<int>(std::ceil((hi - lo) / delta)));
    DiscretizationMap map{lo, hi, k};
    std::ostringstream name;
    name << model.name() << "|cells:" << k + 1;
    return Discretization{build_cell_model(model, map, name.str()), map};
  };

  if (options.interior_cells > 0) return make((hi - lo) / options.interior_cells);
  if (options.delta > 0.0) return make(options.delta);

  // Halving rule: refine until the Fisher information of the discretized
  // model settles to within eps between successive halvings.
  double delta = (hi - lo) / 8.0;
  Discretization current = make(delta);
  double info = fisher_info_raw(current.model, theta);
  for (int round = 0; round < 12; ++round) {
    delta *= 0.5;
    Discretization finer = make(delta);
    const double finer_info = fisher_info_raw(finer.model, theta);
    const double change = std::fabs(finer_info - info);
    current = std::move(finer);
    info = finer_info;
    if (change < options.eps) return current;
  }
  throw NumericError("discretize: halving rule did not settle within 12 rounds");
}

AnyModel model_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = (colon == std::string::npos) ? "" : spec.substr(colon + 1);
  auto parse_number = [&](const char* what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(arg, &used);
      if (used != arg.size() || arg.empty()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("model spec '") + spec + "': expected " + what);
    }
  };
  if (head == "bernoulli") {
    if (!arg.empty()) throw std::invalid_argument("model spec 'bernoulli' takes no argument");
    return bernoulli_model();
  }
  if (head == "binomial") {
    const double m = parse_number("binomial:m with integer m >= 1");
    if (m < 1.0 || m != std::floor(m) || m > 1000.0)
      throw std::invalid_argument("model spec 'binomial:m': m must be an integer in [1, 1000]");
    return binomial_model(static_cast<int>(m));
  }
  if (head == "gaussian-location") {
    const double sigma = parse_number("gaussian-location:sigma with sigma > 0");
    if (!(sigma > 0.0))
      throw std::invalid_argument("model spec 'gaussian-location:sigma': sigma must be > 0");
    return gaussian_location_model(sigma);
  }
  throw std::invalid_argument("unknown model name '" + head +
                              "' (expected bernoulli, binomial:m, gaussian-location:sigma)");
}

const ThetaDomain& theta_domain(const AnyModel& model) {
  if (const auto* d = std::get_if<DiscreteModel>(&model)) return d->theta_domain();
  return std::get<ContinuousModel>(model).theta_domain();
}

}  // namespace ldpeff
