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

#include "ldpeff/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ldpeff/rng.hpp"

using namespace ldpeff;

TEST_CASE("normal quantile and cdf agree") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(1.0 - 0.5e-3) == doctest::Approx(3.2905267314919255).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  for (double x = -4.0; x <= 4.0; x += 0.37)
    CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("chi-square survival function hits the classical critical point") {
  CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_sf(0.0, 5.0) == doctest::Approx(1.0));
  CHECK(chi_square_sf(100.0, 2.0) < 1e-20);
}

TEST_CASE("anderson-darling statistic matches a hand-computed value") {
  const std::vector<double> x{-1.0, 0.0, 1.0};
  const auto res = anderson_darling_normal(x);
  CHECK(res.a_squared == doctest::Approx(0.1894880545375659).epsilon(1e-12));
  CHECK(res.p_value > 0.5);
}

TEST_CASE("anderson-darling accepts normal samples and rejects shifted ones") {
  SplitMix64 rng(2024);
  std::vector<double> z(2000);
  for (auto& v : z) v = normal_quantile(rng.next_double_open());
  const auto ok = anderson_darling_normal(z);
  CHECK(ok.p_value > 0.01);

  for (auto& v : z) v += 0.5;
  const auto bad = anderson_darling_normal(z);
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("mean and sample variance") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(x) == doctest::Approx(2.5));
  CHECK(sample_variance(x) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), std::invalid_argument);
}
