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

// Exercises the shared-library surface the way an external client would:
// through opaque handles, status codes, and JSON strings only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "ldpeff/ldpeff.h"

namespace {

using nlohmann::json;

struct StringDeleter {
  void operator()(char* s) const { ldpeff_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct ModelDeleter {
  void operator()(ldpeff_model* m) const { ldpeff_model_free(m); }
};
using Model = std::unique_ptr<ldpeff_model, ModelDeleter>;

struct ChannelDeleter {
  void operator()(ldpeff_channel* c) const { ldpeff_channel_free(c); }
};
using ChannelPtr = std::unique_ptr<ldpeff_channel, ChannelDeleter>;

Model make_model(const char* spec) {
  ldpeff_model* raw = nullptr;
  REQUIRE(ldpeff_model_create(spec, &raw) == LDPEFF_OK);
  return Model(raw);
}

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::string(ldpeff_version()) == "0.1.0");
  ldpeff_model* raw = nullptr;
  CHECK(ldpeff_model_create("no-such-model", &raw) == LDPEFF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ldpeff_last_error()).find("no-such-model") != std::string::npos);
}

TEST_CASE("model handles expose domain, size and information") {
  Model model = make_model("bernoulli");
  double lo = 0.0, hi = 0.0;
  CHECK(ldpeff_model_theta_domain(model.get(), &lo, &hi) == LDPEFF_OK);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(1.0));
  size_t k = 0;
  CHECK(ldpeff_model_size(model.get(), &k) == LDPEFF_OK);
  CHECK(k == 2);
  double info = 0.0;
  CHECK(ldpeff_fisher_raw(model.get(), 0.5, &info) == LDPEFF_OK);
  CHECK(info == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ldpeff_fisher_raw(model.get(), 1.5, &info) == LDPEFF_ERR_DOMAIN);

  Model cont = make_model("gaussian-location:1.0");
  CHECK(ldpeff_model_size(cont.get(), &k) == LDPEFF_OK);
  CHECK(k == 0);  // continuous
}

TEST_CASE("channel JSON round-trip and validation through the C surface") {
  ldpeff_channel* raw = nullptr;
  REQUIRE(ldpeff_channel_randomized_response(2, std::log(3.0), &raw) == LDPEFF_OK);
  ChannelPtr warner(raw);

  char* text = nullptr;
  REQUIRE(ldpeff_channel_to_json(warner.get(), &text) == LDPEFF_OK);
  CString owned(text);
  ldpeff_channel* back_raw = nullptr;
  REQUIRE(ldpeff_channel_from_json(owned.get(), &back_raw) == LDPEFF_OK);
  ChannelPtr back(back_raw);

  int pass = 0;
  char* report = nullptr;
  REQUIRE(ldpeff_channel_validate(back.get(), std::log(3.0), &pass, &report) == LDPEFF_OK);
  CString report_owned(report);
  CHECK(pass == 1);

  // Tighter budget than the channel was built for: must be refused.
  REQUIRE(ldpeff_channel_validate(back.get(), 0.5, &pass, &report) == LDPEFF_OK);
  CString report2(report);
  CHECK(pass == 0);
  CHECK(std::string(report2.get()).size() > 0);

  CHECK(ldpeff_channel_from_json("{\"alpha\": 1}", &back_raw) ==
        LDPEFF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("optimal mechanism and private information via handles") {
  Model model = make_model("bernoulli");
  double i_star = 0.0;
  ldpeff_channel* raw = nullptr;
  REQUIRE(ldpeff_solve_optimal(model.get(), 0.5, std::log(3.0), 0.0, &i_star, &raw) ==
          LDPEFF_OK);
  ChannelPtr channel(raw);
  CHECK(i_star == doctest::Approx(1.0).epsilon(1e-9));

  double info = 0.0;
  REQUIRE(ldpeff_fisher_private(channel.get(), model.get(), 0.5, &info) == LDPEFF_OK);
  CHECK(info == doctest::Approx(i_star).epsilon(1e-12));

  char* text = nullptr;
  REQUIRE(ldpeff_channel_to_json(channel.get(), &text) == LDPEFF_OK);
  CString owned(text);
  const json doc = json::parse(owned.get());
  CHECK(doc.at("matrix").size() == 4);

  double c_alpha = 0.0;
  REQUIRE(ldpeff_binomial2_threshold(1.5, &c_alpha) == LDPEFF_OK);
  CHECK(c_alpha > 0.0);
  CHECK(c_alpha < 0.5);
  REQUIRE(ldpeff_binomial2_threshold(std::log(3.0), &c_alpha) == LDPEFF_OK);
  CHECK(c_alpha <= 1e-8);
}

TEST_CASE("two-step pipeline over the C surface") {
  Model model = make_model("bernoulli");
  const json config = {
      {"theta0", 0.3}, {"alpha", 1.0}, {"n", 20000}, {"seed", 4242}};
  char* raw = nullptr;
  REQUIRE(ldpeff_two_step(model.get(), config.dump().c_str(), &raw) == LDPEFF_OK);
  CString owned(raw);
  const json result = json::parse(owned.get());
  CHECK(result.at("log").at("n1").get<std::size_t>() == 1025);
  CHECK(result.at("k_hat").get<std::size_t>() == 2);
  const double theta_hat = result.at("theta_hat").get<double>();
  CHECK(theta_hat > 0.2);
  CHECK(theta_hat < 0.4);
  CHECK(result.at("channel").at("matrix").size() == 4);

  // Determinism through the C surface.
  char* raw2 = nullptr;
  REQUIRE(ldpeff_two_step(model.get(), config.dump().c_str(), &raw2) == LDPEFF_OK);
  CString owned2(raw2);
  CHECK(std::string(owned.get()) == owned2.get());

  const json unseeded = {{"theta0", 0.3}, {"alpha", 1.0}, {"n", 20000}};
  CHECK(ldpeff_two_step(model.get(), unseeded.dump().c_str(), &raw) ==
        LDPEFF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ldpeff_last_error()).find("seed") != std::string::npos);
}

TEST_CASE("simulation over the C surface writes CSV and summary") {
  Model model = make_model("bernoulli");
  const json config = {{"estimator", "warner"}, {"theta0", 0.3},
                       {"alpha", std::log(3.0)}, {"n", 2000},
                       {"replications", 20},     {"seed", 7}};
  const char* path = "capi_sim_test.csv";
  char* raw = nullptr;
  REQUIRE(ldpeff_simulate(model.get(), config.dump().c_str(), path, &raw) == LDPEFF_OK);
  CString owned(raw);
  const json summary = json::parse(owned.get());
  CHECK(summary.contains("mean"));
  CHECK(summary.at("var_bound").get<double>() == doctest::Approx(0.96).epsilon(1e-9));

  std::ifstream csv(path);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "rep,seed,theta_tilde,theta_hat,k_hat,i_star_hat");
  std::size_t data_lines = 0;
  for (std::string line; std::getline(csv, line);) ++data_lines;
  CHECK(data_lines == 20);
  std::remove(path);
}

TEST_CASE("bound table over the C surface") {
  Model model = make_model("binomial:2");
  const double thetas[2] = {0.2, 0.5};
  const double alphas[2] = {1.0, 2.0};
  char* raw = nullptr;
  REQUIRE(ldpeff_bound_table(model.get(), thetas, 2, alphas, 2, &raw) == LDPEFF_OK);
  CString owned(raw);
  const std::string csv(owned.get());
  CHECK(csv.rfind("theta,alpha,i_star,var_bound,i_raw,i_rr\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv) lines += (ch == '\n');
  CHECK(lines == 5);
}
