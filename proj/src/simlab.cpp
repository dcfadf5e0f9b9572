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

#include "ldpeff/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ldpeff/errors.hpp"
#include "ldpeff/staircase.hpp"
#include "ldpeff/stats.hpp"

namespace ldpeff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> draw_raw_sample(const AnyModel& model, double theta0, std::size_t n,
                                    SplitMix64& rng) {
  std::vector<double> x(n);
  if (const auto* d = std::get_if<DiscreteModel>(&model)) {
    const auto p = d->pmf(theta0);
    for (std::size_t i = 0; i < n; ++i) x[i] = d->labels()[sample_categorical(p, rng)];
  } else {
    const auto& c = std::get<ContinuousModel>(model);
    for (std::size_t i = 0; i < n; ++i) x[i] = c.quantile(theta0, rng.next_double_open());
  }
  return x;
}

const DiscreteModel& require_discrete(const AnyModel& model, const char* estimator) {
  const auto* d = std::get_if<DiscreteModel>(&model);
  if (!d)
    throw std::invalid_argument(std::string(estimator) +
                                " estimator requires a discrete model");
  return *d;
}

struct ReplicationOutput {
  double theta_tilde = kNaN;
  double theta_hat = kNaN;
  std::size_t k_hat = 0;
  double i_star_hat = kNaN;
};

// Monotone moment map f(theta) = E_theta[x] and its inversion data for the
// method-of-moments estimator.
struct MomentInversion {
  double lo = 0.0, hi = 0.0;  // clipped parameter interval
  bool increasing = true;

  static MomentInversion build(const DiscreteModel& model) {
    MomentInversion inv;
    const ThetaDomain& dom = model.theta_domain();
    const double m = 1e-9 * dom.width();
    inv.lo = dom.lo + m;
    inv.hi = dom.hi - m;
    double prev = kNaN;
    bool incr = true, decr = true;
    for (int g = 0; g <= 16; ++g) {
      const double theta = inv.lo + (inv.hi - inv.lo) * g / 16.0;
      const double f = moment(model, theta);
      if (g > 0) {
        incr = incr && f >= prev;
        decr = decr && f <= prev;
      }
      prev = f;
    }
    if (!incr && !decr)
      throw std::invalid_argument("mom estimator requires a monotone moment map");
    inv.increasing = incr;
    return inv;
  }

  static double moment(const DiscreteModel& model, double theta) {
    const auto p = model.pmf(theta);
    double f = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) f += model.labels()[j] * p[j];
    return f;
  }

  double invert(const DiscreteModel& model, double target) const {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
      const double mid = 0.5 * (a + b);
      const double f = moment(model, mid);
      const bool go_right = increasing ? (f < target) : (f > target);
      if (go_right)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  }
};

class ReplicationRunner {
 public:
  ReplicationRunner(const AnyModel& model, const SimulationConfig& config)
      : model_(model), config_(config) {
    switch (config.estimator) {
      case EstimatorKind::TwoStep:
        break;
      case EstimatorKind::Warner: {
        const auto& d = require_discrete(model, "warner");
        if (d.labels() != std::vector<double>{0.0, 1.0})
          throw std::invalid_argument("warner estimator requires the bernoulli model");
        warner_ = randomized_response(2, config.alpha, d.labels());
        break;
      }
      case EstimatorKind::MethodOfMoments: {
        const auto& d = require_discrete(model, "mom");
        double tau = config.mom_tau;
        if (tau <= 0.0) {
          for (double label : d.labels()) tau = std::max(tau, std::fabs(label));
          if (tau <= 0.0) tau = 1.0;
        }
        mech_ = LaplaceMechanism{tau, config.alpha, 1};
        inversion_ = MomentInversion::build(d);
        box_lo_ = *std::min_element(d.labels().begin(), d.labels().end());
        box_hi_ = *std::max_element(d.labels().begin(), d.labels().end());
        break;
      }
      case EstimatorKind::PrivateMle: {
        const auto& d = require_discrete(model, "private-mle");
        q0_ = default_preliminary_channel(d, config.alpha);
        break;
      }
    }
  }

  ReplicationOutput run(std::uint64_t seed) const {
    SplitMix64 rng(seed);
    std::vector<double> x = draw_raw_sample(model_, config_.theta0, config_.n, rng);
    ReplicationOutput out;
    switch (config_.estimator) {
      case EstimatorKind::TwoStep: {
        TwoStepConfig ts = config_.two_step;
        ts.alpha = config_.alpha;
        ts.seed = seed;
        const TwoStepResult res = two_step_estimate(x, model_, ts, rng);
        out.theta_tilde = res.theta_tilde;
        out.theta_hat = res.theta_hat;
        out.k_hat = res.k_hat;
        out.i_star_hat = res.i_star_hat;
        break;
      }
      case EstimatorKind::Warner: {
        std::vector<int> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
          z[i] = static_cast<int>(sample(warner_, x[i], rng));
        out.theta_hat = warner_estimator(z, config_.alpha);
        out.k_hat = 2;
        break;
      }
      case EstimatorKind::MethodOfMoments: {
        const auto& d = std::get<DiscreteModel>(model_);
        std::vector<std::vector<double>> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double g[1] = {x[i]};
          z[i] = laplace_sanitize(g, mech_, rng);
        }
        const double lo[1] = {box_lo_};
        const double hi[1] = {box_hi_};
        out.theta_hat = method_of_moments(
            z, mech_, lo, hi,
            [&](std::span<const double> avg) { return inversion_.invert(d, avg[0]); });
        out.k_hat = d.size();
        break;
      }
      case EstimatorKind::PrivateMle: {
        const auto& d = std::get<DiscreteModel>(model_);
        std::vector<double> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = sample(q0_, x[i], rng);
        out.theta_hat = private_mle(z, q0_, d, config_.two_step.optimizer);
        out.k_hat = d.size();
        break;
      }
    }
    return out;
  }

 private:
  const AnyModel& model_;
  const SimulationConfig& config_;
  Channel warner_;
  Channel q0_;
  LaplaceMechanism mech_;
  MomentInversion inversion_;
  double box_lo_ = 0.0;
  double box_hi_ = 1.0;
};

}  // namespace

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "two-step") return EstimatorKind::TwoStep;
  if (name == "warner") return EstimatorKind::Warner;
  if (name == "mom") return EstimatorKind::MethodOfMoments;
  if (name == "private-mle") return EstimatorKind::PrivateMle;
  throw std::invalid_argument("unknown estimator '" + name +
                              "' (expected two-step, warner, mom, private-mle)");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::TwoStep: return "two-step";
    case EstimatorKind::Warner: return "warner";
    case EstimatorKind::MethodOfMoments: return "mom";
    case EstimatorKind::PrivateMle: return "private-mle";
  }
  return "unknown";
}

double variance_bound(const AnyModel& model, double theta0, double alpha, std::size_t n) {
  double i_star = 0.0;
  if (const auto* d = std::get_if<DiscreteModel>(&model)) {
    i_star = solve_optimal_mechanism(*d, theta0, alpha).i_star;
  } else {
    const auto& c = std::get<ContinuousModel>(model);
    const double n1 = std::ceil(std::pow(static_cast<double>(std::max<std::size_t>(n, 2)), 0.7));
    const double eps = 1.0 / std::log(n1 + M_E);
    const Discretization disc = discretize(c, theta0, DiscretizeOptions{eps, alpha, 0.0, 0.0});
    i_star = solve_optimal_mechanism(disc.model, theta0, alpha).i_star;
  }
  if (!(i_star > 0.0)) throw NumericError("variance_bound: optimal information is zero");
  return 1.0 / i_star;
}

SimulationSummary run_experiment(const AnyModel& model, const SimulationConfig& config) {
  if (config.replications < 1)
    throw std::invalid_argument("run_experiment: need at least one replication");
  if (!theta_domain(model).contains(config.theta0))
    throw std::domain_error("run_experiment: theta0 outside the parameter domain");
  const auto t_start = std::chrono::steady_clock::now();

  const ReplicationRunner runner(model, config);
  const std::size_t reps = config.replications;
  SimulationSummary summary;
  summary.seeds.resize(reps);
  summary.theta_tilde.assign(reps, kNaN);
  summary.theta_hat.assign(reps, kNaN);
  summary.k_hat.assign(reps, 0);
  summary.i_star_hat.assign(reps, kNaN);
  for (std::size_t r = 0; r < reps; ++r) summary.seeds[r] = mix64(config.base_seed, r);

  const int threads = std::max(1, config.threads);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps || failed.load()) return;
      try {
        const ReplicationOutput out = runner.run(summary.seeds[r]);
        summary.theta_tilde[r] = out.theta_tilde;
        summary.theta_hat[r] = out.theta_hat;
        summary.k_hat[r] = out.k_hat;
        summary.i_star_hat[r] = out.i_star_hat;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) {
          std::ostringstream os;
          os << "replication " << r << " (seed " << summary.seeds[r] << ") failed: " << e.what();
          first_error = os.str();
        }
        failed.store(true);
        return;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("run_experiment: " + first_error);

  summary.mean = mean(summary.theta_hat);
  summary.bias = summary.mean - config.theta0;
  if (reps >= 2)
    summary.var_scaled =
        static_cast<double>(config.n) * sample_variance(summary.theta_hat);
  summary.var_bound = variance_bound(model, config.theta0, config.alpha, config.n);
  if (summary.var_scaled) summary.ratio = *summary.var_scaled / summary.var_bound;
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return summary;
}

void write_replications_csv(const SimulationSummary& summary, std::ostream& out) {
  out << "rep,seed,theta_tilde,theta_hat,k_hat,i_star_hat\n";
  for (std::size_t r = 0; r < summary.theta_hat.size(); ++r) {
    out << r << ',' << summary.seeds[r] << ',' << format17(summary.theta_tilde[r]) << ','
        << format17(summary.theta_hat[r]) << ',' << summary.k_hat[r] << ','
        << format17(summary.i_star_hat[r]) << '\n';
  }
}

std::string summary_to_json(const SimulationConfig& config,
                            const SimulationSummary& summary) {
  nlohmann::json j;
  j["config"] = {
      {"estimator", estimator_name(config.estimator)},
      {"theta0", config.theta0},
      {"alpha", config.alpha},
      {"n", config.n},
      {"replications", config.replications},
      {"seed", config.base_seed},
      {"threads", config.threads},
      {"n1_exponent", config.two_step.n1_exponent},
  };
  if (config.estimator == EstimatorKind::MethodOfMoments) j["config"]["tau"] = config.mom_tau;
  j["seed_derivation"] = "per-replication seed = mix64(seed, replication_index)";
  j["mean"] = summary.mean;
  j["bias"] = summary.bias;
  j["var_scaled"] = summary.var_scaled ? nlohmann::json(*summary.var_scaled)
                                       : nlohmann::json(nullptr);
  j["var_bound"] = summary.var_bound;
  j["ratio"] = summary.ratio ? nlohmann::json(*summary.ratio) : nlohmann::json(nullptr);
  j["wall_seconds"] = summary.wall_seconds;
  return j.dump(2);
}

std::vector<BoundRow> bound_table(const AnyModel& model, std::span<const double> theta_grid,
                                  std::span<const double> alpha_grid, double eps) {
  std::vector<BoundRow> rows;
  rows.reserve(theta_grid.size() * alpha_grid.size());
  for (double theta : theta_grid) {
    for (double alpha : alpha_grid) {
      const DiscreteModel* cells = nullptr;
      std::optional<Discretization> disc;
      if (const auto* d = std::get_if<DiscreteModel>(&model)) {
        cells = d;
      } else {
        DiscretizeOptions opt{0.05, alpha, 0.0, 0.0, 16};
        if (eps > 0.0) {
          opt.eps = eps;
          opt.interior_cells = 0;
        }
        disc = discretize(std::get<ContinuousModel>(model), theta, opt);
        cells = &disc->model;
      }
      BoundRow row;
      row.theta = theta;
      row.alpha = alpha;
      row.i_star = solve_optimal_mechanism(*cells, theta, alpha).i_star;
      row.var_bound = (row.i_star > 0.0) ? 1.0 / row.i_star : kNaN;
      row.i_raw = fisher_info_raw(*cells, theta);
      row.i_rr = fisher_info_private(randomized_response(cells->size(), alpha, cells->labels()),
                                     *cells, theta);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bound_table_csv(std::span<const BoundRow> rows, std::ostream& out) {
  out << "theta,alpha,i_star,var_bound,i_raw,i_rr\n";
  for (const auto& row : rows) {
    out << format17(row.theta) << ',' << format17(row.alpha) << ',' << format17(row.i_star)
        << ',' << format17(row.var_bound) << ',' << format17(row.i_raw) << ','
        << format17(row.i_rr) << '\n';
  }
}

}  // namespace ldpeff
