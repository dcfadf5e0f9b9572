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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// the measured quantities; the process exits with the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ldpeff/estimators.hpp"
#include "ldpeff/fisher.hpp"
#include "ldpeff/kernels.hpp"
#include "ldpeff/models.hpp"
#include "ldpeff/simlab.hpp"
#include "ldpeff/staircase.hpp"
#include "ldpeff/stats.hpp"
#include "support/oracles.hpp"

namespace {

using namespace ldpeff;

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << "FAILED: " << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

double warner_info(double theta, double alpha) {
  const double e = std::exp(alpha);
  return 1.0 / (e / ((e - 1.0) * (e - 1.0)) + theta * (1.0 - theta));
}

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 0) {
    std::nth_element(values.begin(), values.begin() + mid - 1, values.end());
    return 0.5 * (values[mid - 1] + hi);
  }
  return hi;
}

// 1. The binary optimum equals the closed form on a theta x alpha grid.
Check criterion1() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const auto bern = bernoulli_model();
  double worst = 0.0;
  for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double alpha : {0.5, 1.0, std::log(3.0), 2.0}) {
      const double i_star = solve_optimal_mechanism(bern, theta, alpha).i_star;
      worst = std::max(worst, std::fabs(i_star - warner_info(theta, alpha)));
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require(worst <= 1e-9, "|I* - closed form| <= 1e-9");
  check.require(seconds < 1.0, "runtime < 1 s");
  check.detail << "max gap " << worst << ", " << seconds << " s"
               << (check.pass ? "" : " (out of bounds)");
  return check;
}

// 2. Ternary regime structure below and above the log-3 budget.
Check criterion2() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const auto bin = binomial_model(2);

  double min_margin = 1e300;
  for (int i = 1; i <= 99; ++i) {
    const double theta = i / 100.0;
    const double i_star = solve_optimal_mechanism(bin, theta, 1.0).i_star;
    const double i_rr =
        fisher_info_private(randomized_response(3, 1.0, bin.labels()), bin, theta);
    min_margin = std::min(min_margin, i_star - i_rr);
  }
  check.require(min_margin > 0.0, "baseline strictly below I* on the grid at alpha=1");

  const double c = binomial2_threshold(1.5);
  check.require(c > 0.0 && c < 0.5, "c_alpha in (0, 1/2) at alpha=1.5");
  double worst = 0.0;
  for (int i = 1; i <= 99; ++i) {
    const double theta = i / 100.0;
    const double i_star = solve_optimal_mechanism(bin, theta, 1.5).i_star;
    const double best =
        fisher_info_private(binomial2_reference(theta, 1.5), bin, theta);
    worst = std::max(worst, std::fabs(i_star - best));
  }
  check.require(worst <= 1e-8, "|LP - regime best| <= 1e-8 at alpha=1.5");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require(seconds < 5.0, "runtime < 5 s");
  check.detail << "min margin " << min_margin << ", c_1.5 = " << c << ", max gap " << worst
               << ", " << seconds << " s";
  return check;
}

// 3. LP optimum equals the brute-force vertex-enumeration optimum.
Check criterion3() {
  Check check;
  double worst2 = 0.0, worst3 = 0.0;
  {
    const auto bern = bernoulli_model();
    SplitMix64 rng(93);
    for (int block = 0; block < 4; ++block) {
      const double alpha = 0.4 + 2.0 * rng.next_double();
      const testing::ChannelPolytopeOracle oracle(2, alpha);
      for (int rep = 0; rep < 5; ++rep) {
        const double theta = 0.05 + 0.9 * rng.next_double();
        const double brute = oracle.max_info(bern.pmf(theta), bern.pmf_dot(theta));
        const double lp = solve_optimal_mechanism(bern, theta, alpha).i_star;
        worst2 = std::max(worst2, std::fabs(lp - brute));
      }
    }
  }
  {
    const auto bin = binomial_model(2);
    SplitMix64 rng(94);
    for (int block = 0; block < 4; ++block) {
      const double alpha = 0.4 + 2.0 * rng.next_double();
      const testing::ChannelPolytopeOracle oracle(3, alpha);
      for (int rep = 0; rep < 5; ++rep) {
        const double theta = 0.05 + 0.9 * rng.next_double();
        const double brute = oracle.max_info(bin.pmf(theta), bin.pmf_dot(theta));
        const double lp = solve_optimal_mechanism(bin, theta, alpha).i_star;
        worst3 = std::max(worst3, std::fabs(lp - brute));
      }
    }
  }
  check.require(worst2 <= 1e-8, "k=2 within 1e-8 of the vertex oracle");
  check.require(worst3 <= 1e-8, "k=3 within 1e-8 of the vertex oracle");
  check.detail << "max gap k=2: " << worst2 << ", k=3: " << worst3;
  return check;
}

// 4. The closed-form binary estimator attains the Cramer-Rao bound.
Check criterion4() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  SimulationConfig config;
  config.estimator = EstimatorKind::Warner;
  config.theta0 = 0.3;
  config.alpha = std::log(3.0);
  config.n = 10000;
  config.replications = 2000;
  config.base_seed = 20240101;
  const AnyModel model = bernoulli_model();
  const auto summary = run_experiment(model, config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double ratio = summary.ratio.value_or(-1.0);
  check.require(ratio >= 0.90 && ratio <= 1.10, "n Var / (1/I*) in [0.90, 1.10]");
  check.require(seconds < 30.0, "runtime < 30 s");
  check.detail << "ratio " << ratio << " (bound " << summary.var_bound << "), " << seconds
               << " s";
  return check;
}

// 5. The two-step estimator attains the optimal variance at desk scale.
Check criterion5() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  SimulationConfig config;
  config.estimator = EstimatorKind::TwoStep;
  config.theta0 = 0.3;
  config.alpha = 1.0;
  config.n = 20000;
  config.replications = 500;
  config.base_seed = 31415926;
  const AnyModel model = bernoulli_model();
  const auto summary = run_experiment(model, config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double ratio = summary.ratio.value_or(-1.0);
  const double sd = std::sqrt(*summary.var_scaled / static_cast<double>(config.n));
  const double se = sd / std::sqrt(static_cast<double>(config.replications));
  check.require(ratio >= 0.85 && ratio <= 1.20, "n Var / (1/I*) in [0.85, 1.20]");
  check.require(std::fabs(summary.bias) < 3.0 * se, "|mean bias| < 3 SE");
  check.require(seconds < 300.0, "runtime < 5 min");
  check.detail << "ratio " << ratio << ", bias " << summary.bias << " (3SE " << 3.0 * se
               << "), " << seconds << " s";
  return check;
}

// 6. The estimated mechanism's information approaches the optimum as the
// first group grows: medians of the gap do not increase across n1.
Check criterion6() {
  Check check;
  const auto bin = binomial_model(2);
  const double theta0 = 0.15;
  const double alpha = 1.0;
  const double i_star = solve_optimal_mechanism(bin, theta0, alpha).i_star;
  const auto p0 = bin.pmf(theta0);

  std::vector<double> medians;
  for (std::size_t n1 : {500u, 2000u, 8000u}) {
    std::vector<double> gaps;
    for (int rep = 0; rep < 200; ++rep) {
      SplitMix64 rng(mix64(mix64(600, n1), static_cast<std::uint64_t>(rep)));
      TwoStepConfig config;
      config.alpha = alpha;
      config.n1_override = n1;
      std::vector<double> x(n1 + 1000);
      for (auto& v : x) v = bin.labels()[sample_categorical(p0, rng)];
      const auto result = two_step_estimate(x, bin, config, rng);
      gaps.push_back(std::fabs(fisher_info_private(result.channel_hat, bin, theta0) - i_star));
    }
    medians.push_back(median(std::move(gaps)));
  }
  check.require(medians[0] >= medians[1] && medians[1] >= medians[2],
                "median gap non-increasing across n1 in {500, 2000, 8000}");
  check.detail << "medians " << medians[0] << " >= " << medians[1] << " >= " << medians[2];
  return check;
}

// 7. Property suites: data processing, post-processing, convexity and
// homogeneity, parameter continuity, release-density ratio.
Check criterion7() {
  Check check;
  const auto bin = binomial_model(2);

  {  // data-processing inequality, 1000 random channels
    SplitMix64 rng(701);
    bool ok = true;
    for (int rep = 0; rep < 1000 && ok; ++rep) {
      const double alpha = 0.2 + 2.5 * rng.next_double();
      const double theta = 0.02 + 0.96 * rng.next_double();
      auto q = testing::random_valid_channel(2 + rep % 4, 3, alpha, rng);
      q.input_labels = bin.labels();
      const double priv = fisher_info_private(q, bin, theta);
      ok = priv >= -1e-12 && priv <= fisher_info_raw(bin, theta) + 1e-9;
    }
    check.require(ok, "0 <= I(QP) <= I(P) on 1000 random channels");
  }
  {  // post-processing monotonicity, 500 compositions
    SplitMix64 rng(702);
    bool ok = true;
    for (int rep = 0; rep < 500 && ok; ++rep) {
      const double alpha = 0.3 + 2.0 * rng.next_double();
      const double theta = 0.05 + 0.9 * rng.next_double();
      auto q = testing::random_valid_channel(3 + rep % 3, 3, alpha, rng);
      q.input_labels = bin.labels();
      const auto t = testing::random_stochastic_kernel(2 + rep % 4, q.rows, rng);
      auto tq = compose_post(t, q);
      tq.input_labels = bin.labels();
      ok = fisher_info_private(tq, bin, theta) <= fisher_info_private(q, bin, theta) + 1e-10;
    }
    check.require(ok, "post-processing monotonicity on 500 compositions");
  }
  {  // convexity and positive homogeneity of the row functional
    SplitMix64 rng(703);
    const auto p = bin.pmf(0.35);
    const auto d = bin.pmf_dot(0.35);
    bool ok = true;
    for (int rep = 0; rep < 1000 && ok; ++rep) {
      const auto v1 = testing::random_cone_point(3, 1.0, rng);
      const auto v2 = testing::random_cone_point(3, 1.0, rng);
      const double lam = rng.next_double();
      std::vector<double> mix(3);
      for (int j = 0; j < 3; ++j) mix[j] = lam * v1[j] + (1.0 - lam) * v2[j];
      ok = g_theta(mix, p, d) <=
           lam * g_theta(v1, p, d) + (1.0 - lam) * g_theta(v2, p, d) + 1e-12;
      if (ok) {
        const double c = 0.1 + 5.0 * rng.next_double();
        std::vector<double> cv(3);
        for (int j = 0; j < 3; ++j) cv[j] = c * v1[j];
        const double lhs = g_theta(cv, p, d);
        const double rhs = c * g_theta(v1, p, d);
        ok = std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs));
      }
    }
    check.require(ok, "convexity and homogeneity on 1000 cone points");
  }
  {  // parameter continuity bound, 200 random triples
    SplitMix64 rng(704);
    bool ok = true;
    for (int rep = 0; rep < 200 && ok; ++rep) {
      const double alpha = 0.3 + 1.5 * rng.next_double();
      const double theta = 0.05 + 0.9 * rng.next_double();
      const double theta2 = 0.05 + 0.9 * rng.next_double();
      auto q = testing::random_valid_channel(3, 3, alpha, rng);
      q.input_labels = bin.labels();
      const double drift =
          std::fabs(fisher_info_private(q, bin, theta) - fisher_info_private(q, bin, theta2));
      ok = drift <= continuity_bound(bin, theta, theta2, alpha) + 1e-9;
    }
    check.require(ok, "continuity bound on 200 random triples");
  }
  {  // release-density privacy ratio on a deterministic grid
    const double alpha = 1.3;
    const double tau = 1.0;
    const double scale = 2.0 * tau / alpha;
    const std::vector<std::vector<double>> inputs{
        {0.2, -0.5}, {-1.0, 0.3}, {0.5, 0.5}, {10.0, 10.0}, {0.0, 0.0}};
    auto truncate = [tau](std::vector<double> y) {
      double l1 = 0.0;
      for (double v : y) l1 += std::fabs(v);
      if (l1 > tau) return std::vector<double>{0.0, 0.0};
      return y;
    };
    auto log_density = [&](const std::vector<double>& z, const std::vector<double>& y) {
      const auto c = truncate(y);
      double acc = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) acc += -std::fabs(z[i] - c[i]) / scale;
      return acc;
    };
    bool ok = true;
    const std::vector<double> grid{-2.0, -0.7, 0.0, 0.33, 1.5, 3.0};
    for (double z0 : grid)
      for (double z1 : grid)
        for (const auto& y : inputs)
          for (const auto& y2 : inputs)
            ok = ok &&
                 log_density({z0, z1}, y) - log_density({z0, z1}, y2) <= alpha + 1e-12;
    check.require(ok, "release-density ratio <= e^alpha on the grid");
  }
  check.detail << "all property suites within stated tolerances";
  return check;
}

// 8. Standardized two-step estimates look standard normal.
Check criterion8() {
  Check check;
  SimulationConfig config;
  config.estimator = EstimatorKind::TwoStep;
  config.theta0 = 0.3;
  config.alpha = 1.0;
  config.n = 20000;
  config.replications = 1000;
  config.base_seed = 2;
  const AnyModel model = bernoulli_model();
  const auto summary = run_experiment(model, config);
  const double i_star = 1.0 / summary.var_bound;
  std::vector<double> z(summary.theta_hat.size());
  const double scale = std::sqrt(static_cast<double>(config.n) * i_star);
  for (std::size_t r = 0; r < z.size(); ++r)
    z[r] = scale * (summary.theta_hat[r] - config.theta0);
  const auto ad = anderson_darling_normal(z);
  check.require(ad.p_value > 0.001, "Anderson-Darling p > 0.001");
  check.detail << "A^2 " << ad.a_squared << ", p " << ad.p_value;
  return check;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    std::function<Check()> run;
  };
  const std::vector<Entry> entries{
      {1, "binary optimum equals the closed form", criterion1},
      {2, "ternary regime structure across the log-3 budget", criterion2},
      {3, "LP agrees with brute-force vertex enumeration", criterion3},
      {4, "closed-form binary estimator attains the variance bound", criterion4},
      {5, "two-step estimator attains the optimal variance", criterion5},
      {6, "estimated mechanism information converges", criterion6},
      {7, "property suites", criterion7},
      {8, "standardized two-step estimates pass normality", criterion8},
  };
  int failures = 0;
  for (const auto& entry : entries) {
    Check check;
    try {
      check = entry.run();
    } catch (const std::exception& e) {
      check.pass = false;
      check.detail << "exception: " << e.what();
    }
    failures += check.pass ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%s)\n", check.pass ? "PASS" : "FAIL", entry.id,
                entry.label, check.detail.str().c_str());
    std::fflush(stdout);
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", entries.size());
  else
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures, entries.size());
  return failures;
}
