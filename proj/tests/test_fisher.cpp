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

#include "ldpeff/fisher.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ldpeff/models.hpp"
#include "support/oracles.hpp"

using namespace ldpeff;

namespace {

double warner_info(double theta, double alpha) {
  const double e = std::exp(alpha);
  return 1.0 / (e / ((e - 1.0) * (e - 1.0)) + theta * (1.0 - theta));
}

Channel binomial2_first_case(double alpha) {
  const double e = std::exp(alpha);
  Channel c;
  c.rows = 3;
  c.cols = 3;
  c.alpha = alpha;
  c.input_labels = {0.0, 1.0, 2.0};
  c.output_labels = {0.0, 1.0, 2.0};
  c.matrix = {e, 1, 1, 1, e, e, 0, 0, 0};
  for (auto& v : c.matrix) v /= (e + 1.0);
  return c;
}

Channel constant_channel(std::size_t k) {
  Channel c;
  c.rows = 1;
  c.cols = k;
  c.alpha = 1.0;
  c.matrix.assign(k, 1.0);
  for (std::size_t j = 0; j < k; ++j) c.input_labels.push_back(static_cast<double>(j));
  c.output_labels = {0.0};
  return c;
}

}  // namespace

TEST_CASE("row functional g") {
  const auto bern = bernoulli_model();
  const auto p = bern.pmf(0.5);
  const auto d = bern.pmf_dot(0.5);

  SUBCASE("the all-ones direction carries no information") {
    const std::vector<double> ones{1.0, 1.0};
    CHECK(std::fabs(g_theta(ones, p, d)) < 1e-20);
  }
  SUBCASE("hand-computed value at the symmetric point") {
    const double e = std::exp(std::log(3.0));
    const std::vector<double> v{e, 1.0};
    CHECK(g_theta(v, p, d) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("positive homogeneity") {
    SplitMix64 rng(6);
    for (int rep = 0; rep < 1000; ++rep) {
      const auto v = testing::random_cone_point(2, 1.2, rng);
      const double c = 0.1 + 5.0 * rng.next_double();
      std::vector<double> cv{c * v[0], c * v[1]};
      const double lhs = g_theta(cv, p, d);
      const double rhs = c * g_theta(v, p, d);
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
    }
  }
  SUBCASE("convexity on the cone") {
    SplitMix64 rng(16);
    const auto bin = binomial_model(2);
    const auto p3 = bin.pmf(0.35);
    const auto d3 = bin.pmf_dot(0.35);
    for (int rep = 0; rep < 1000; ++rep) {
      const auto v1 = testing::random_cone_point(3, 1.0, rng);
      const auto v2 = testing::random_cone_point(3, 1.0, rng);
      const double lam = rng.next_double();
      std::vector<double> mix(3);
      for (int j = 0; j < 3; ++j) mix[j] = lam * v1[j] + (1.0 - lam) * v2[j];
      const double lhs = g_theta(mix, p3, d3);
      const double rhs = lam * g_theta(v1, p3, d3) + (1.0 - lam) * g_theta(v2, p3, d3);
      CHECK(lhs <= rhs + 1e-12);
    }
  }
  SUBCASE("negative directions are rejected") {
    CHECK_THROWS_AS(g_theta(std::vector<double>{-1.0, 1.0}, p, d), std::invalid_argument);
  }
}

TEST_CASE("privatized Fisher information") {
  const auto bern = bernoulli_model();
  SUBCASE("the symmetric binary channel hits its closed form") {
    for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (double alpha : {0.5, 1.0, std::log(3.0), 2.0}) {
        const auto warner = randomized_response(2, alpha, bern.labels());
        CHECK(fisher_info_private(warner, bern, theta) ==
              doctest::Approx(warner_info(theta, alpha)).epsilon(1e-12));
      }
  }
  SUBCASE("exactly one at the symmetric point with budget log 3") {
    const auto warner = randomized_response(2, std::log(3.0), bern.labels());
    CHECK(fisher_info_private(warner, bern, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant channels carry nothing") {
    CHECK(fisher_info_private(constant_channel(2), bern, 0.3) == doctest::Approx(0.0));
  }
  SUBCASE("agrees with the separately coded row-sum reference") {
    const auto bin = binomial_model(2);
    const auto channel = binomial2_first_case(std::log(2.0));
    const auto p = bin.pmf(0.2);
    const auto d = bin.pmf_dot(0.2);
    const double reference =
        testing::reference_private_info(channel.matrix, channel.rows, channel.cols, p, d);
    CHECK(reference == doctest::Approx(1.1477761836441895).epsilon(1e-12));
    CHECK(fisher_info_private(channel, bin, 0.2) == doctest::Approx(reference).epsilon(1e-12));
  }
  SUBCASE("label mismatch is rejected") {
    const auto rr = randomized_response(2, 1.0, {5.0, 6.0});
    CHECK_THROWS_AS(fisher_info_private(rr, bern, 0.5), std::invalid_argument);
  }
}

TEST_CASE("data-processing inequality over random channels") {
  SplitMix64 rng(99);
  const auto bin = binomial_model(2);
  for (int rep = 0; rep < 1000; ++rep) {
    const double alpha = 0.2 + 2.5 * rng.next_double();
    const double theta = 0.02 + 0.96 * rng.next_double();
    auto q = testing::random_valid_channel(2 + rep % 4, 3, alpha, rng);
    q.input_labels = bin.labels();
    const double priv = fisher_info_private(q, bin, theta);
    const double raw = fisher_info_raw(bin, theta);
    CHECK(priv >= -1e-12);
    CHECK(priv <= raw + 1e-9);
  }
}

TEST_CASE("post-processing cannot increase information") {
  SplitMix64 rng(100);
  const auto bin = binomial_model(2);
  for (int rep = 0; rep < 500; ++rep) {
    const double alpha = 0.3 + 2.0 * rng.next_double();
    const double theta = 0.05 + 0.9 * rng.next_double();
    auto q = testing::random_valid_channel(3 + rep % 3, 3, alpha, rng);
    q.input_labels = bin.labels();
    const auto t = testing::random_stochastic_kernel(2 + rep % 4, q.rows, rng);
    auto tq = compose_post(t, q);
    tq.input_labels = bin.labels();
    CHECK(fisher_info_private(tq, bin, theta) <=
          fisher_info_private(q, bin, theta) + 1e-10);
  }
}

TEST_CASE("private score tables") {
  const auto bern = bernoulli_model();
  const double ln3 = std::log(3.0);
  SUBCASE("hand computation for the binary case") {
    const auto warner = randomized_response(2, ln3, bern.labels());
    const auto table = private_score(warner, bern, 0.5);
    CHECK(table.q[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(table.q[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(table.t[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(table.t[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(table.variance() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant channels have zero score") {
    const auto table = private_score(constant_channel(2), bern, 0.3);
    CHECK(table.t[0] == doctest::Approx(0.0));
  }
  SUBCASE("variance identity and structural invariants on random channels") {
    SplitMix64 rng(55);
    const auto bin = binomial_model(2);
    for (int rep = 0; rep < 100; ++rep) {
      const double alpha = 0.3 + 2.0 * rng.next_double();
      const double theta = 0.05 + 0.9 * rng.next_double();
      auto q = testing::random_valid_channel(3, 3, alpha, rng);
      q.input_labels = bin.labels();
      const auto table = private_score(q, bin, theta);
      double qsum = 0.0, mean_t = 0.0, max_t = 0.0;
      for (std::size_t i = 0; i < table.q.size(); ++i) {
        qsum += table.q[i];
        mean_t += table.t[i] * table.q[i];
        max_t = std::max(max_t, std::fabs(table.t[i]));
      }
      CHECK(std::fabs(qsum - 1.0) <= 1e-12);
      CHECK(std::fabs(mean_t) <= 1e-10);
      CHECK(max_t <=
            std::exp(2.0 * alpha) * std::sqrt(fisher_info_raw(bin, theta)) + 1e-9);
      CHECK(std::fabs(table.variance() - fisher_info_private(q, bin, theta)) <= 1e-10);
    }
  }
}

TEST_CASE("information is uniformly continuous in the parameter") {
  const auto bern = bernoulli_model();
  SUBCASE("zero at equal parameters") {
    CHECK(continuity_bound(bern, 0.4, 0.4, 1.0) == doctest::Approx(0.0));
  }
  SUBCASE("hand arithmetic for the binary model") {
    // |p - p'| in l1 is 0.2, the derivative term vanishes, and the larger
    // information is 1/0.24, so the bound is e^2 * (1/0.24) * 0.6 = 2.5 e^2.
    const double expected = std::exp(2.0) * 2.5;
    CHECK(continuity_bound(bern, 0.5, 0.6, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("bounds the information drift for random channels") {
    SplitMix64 rng(61);
    const auto bin = binomial_model(2);
    for (int rep = 0; rep < 200; ++rep) {
      const double alpha = 0.3 + 1.5 * rng.next_double();
      const double theta = 0.05 + 0.9 * rng.next_double();
      const double theta2 = 0.05 + 0.9 * rng.next_double();
      auto q = testing::random_valid_channel(3, 3, alpha, rng);
      q.input_labels = bin.labels();
      const double drift =
          std::fabs(fisher_info_private(q, bin, theta) - fisher_info_private(q, bin, theta2));
      CHECK(drift <= continuity_bound(bin, theta, theta2, alpha) + 1e-9);
    }
  }
}
