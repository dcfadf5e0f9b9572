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

#include "ldpeff/ldpeff.h"

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ldpeff/errors.hpp"
#include "ldpeff/estimators.hpp"
#include "ldpeff/fisher.hpp"
#include "ldpeff/kernels.hpp"
#include "ldpeff/models.hpp"
#include "ldpeff/rng.hpp"
#include "ldpeff/simlab.hpp"
#include "ldpeff/staircase.hpp"
#include "ldpeff/version.hpp"

struct ldpeff_model {
  ldpeff::AnyModel value;
};

struct ldpeff_channel {
  ldpeff::Channel value;
};

namespace {

thread_local std::string g_last_error;

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
ldpeff_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return LDPEFF_OK;
  } catch (const ldpeff::ResourceLimitError& e) {
    g_last_error = e.what();
    return LDPEFF_ERR_RESOURCE_LIMIT;
  } catch (const ldpeff::NumericError& e) {
    g_last_error = e.what();
    return LDPEFF_ERR_NUMERIC;
  } catch (const std::domain_error& e) {
    g_last_error = e.what();
    return LDPEFF_ERR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return LDPEFF_ERR_INVALID_ARGUMENT;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return LDPEFF_ERR_INVALID_ARGUMENT;
  } catch (const std::ios_base::failure& e) {
    g_last_error = e.what();
    return LDPEFF_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LDPEFF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LDPEFF_ERR_INTERNAL;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

nlohmann::json parse_config(const char* config_json) {
  require(config_json != nullptr, "config JSON must not be null");
  try {
    return nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config JSON parse error: ") + e.what());
  }
}

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw std::invalid_argument(std::string("config JSON: missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

nlohmann::json channel_json_object(const ldpeff::Channel& channel) {
  return nlohmann::json::parse(ldpeff::channel_to_json(channel));
}

}  // namespace

extern "C" {

const char* ldpeff_version(void) { return LDPEFF_VERSION_STRING; }

const char* ldpeff_last_error(void) { return g_last_error.c_str(); }

void ldpeff_string_free(char* s) { delete[] s; }

ldpeff_status ldpeff_model_create(const char* spec, ldpeff_model** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "spec and out must not be null");
    *out = new ldpeff_model{ldpeff::model_from_spec(spec)};
  });
}

void ldpeff_model_free(ldpeff_model* model) { delete model; }

ldpeff_status ldpeff_model_theta_domain(const ldpeff_model* model, double* lo, double* hi) {
  return guarded([&] {
    require(model != nullptr, "model must not be null");
    const auto& dom = ldpeff::theta_domain(model->value);
    if (lo) *lo = dom.lo;
    if (hi) *hi = dom.hi;
  });
}

ldpeff_status ldpeff_model_size(const ldpeff_model* model, size_t* k) {
  return guarded([&] {
    require(model != nullptr && k != nullptr, "model and k must not be null");
    const auto* d = std::get_if<ldpeff::DiscreteModel>(&model->value);
    *k = d ? d->size() : 0;
  });
}

ldpeff_status ldpeff_fisher_raw(const ldpeff_model* model, double theta, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model and out must not be null");
    const auto* d = std::get_if<ldpeff::DiscreteModel>(&model->value);
    require(d != nullptr, "fisher_raw requires a discrete model");
    *out = ldpeff::fisher_info_raw(*d, theta);
  });
}

ldpeff_status ldpeff_channel_randomized_response(size_t k, double alpha,
                                                 ldpeff_channel** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be null");
    *out = new ldpeff_channel{ldpeff::randomized_response(k, alpha)};
  });
}

ldpeff_status ldpeff_channel_from_json(const char* json, ldpeff_channel** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "json and out must not be null");
    *out = new ldpeff_channel{ldpeff::channel_from_json(json)};
  });
}

ldpeff_status ldpeff_channel_to_json(const ldpeff_channel* channel, char** json_out) {
  return guarded([&] {
    require(channel != nullptr && json_out != nullptr, "channel and out must not be null");
    *json_out = copy_string(ldpeff::channel_to_json(channel->value));
  });
}

void ldpeff_channel_free(ldpeff_channel* channel) { delete channel; }

ldpeff_status ldpeff_channel_validate(const ldpeff_channel* channel, double alpha,
                                      int* pass, char** report_out) {
  return guarded([&] {
    require(channel != nullptr && pass != nullptr, "channel and pass must not be null");
    const auto report = ldpeff::validate_alpha_dp(channel->value, alpha);
    *pass = report.pass ? 1 : 0;
    if (report_out) *report_out = copy_string(report.message);
  });
}

ldpeff_status ldpeff_fisher_private(const ldpeff_channel* channel,
                                    const ldpeff_model* model, double theta, double* out) {
  return guarded([&] {
    require(channel != nullptr && model != nullptr && out != nullptr,
            "channel, model and out must not be null");
    const auto* d = std::get_if<ldpeff::DiscreteModel>(&model->value);
    require(d != nullptr, "fisher_private requires a discrete model");
    *out = ldpeff::fisher_info_private(channel->value, *d, theta);
  });
}

ldpeff_status ldpeff_solve_optimal(const ldpeff_model* model, double theta, double alpha,
                                   double eps, double* i_star, ldpeff_channel** out) {
  return guarded([&] {
    require(model != nullptr, "model must not be null");
    const ldpeff::DiscreteModel* cells = nullptr;
    std::optional<ldpeff::Discretization> disc;
    if (const auto* d = std::get_if<ldpeff::DiscreteModel>(&model->value)) {
      cells = d;
    } else {
      // Default: a fixed 16-cell window, always within the solver cap.
      // An explicit eps selects the adaptive halving rule instead.
      ldpeff::DiscretizeOptions opt{0.05, alpha, 0.0, 0.0, 16};
      if (eps > 0.0) {
        opt.eps = eps;
        opt.interior_cells = 0;
      }
      disc = ldpeff::discretize(std::get<ldpeff::ContinuousModel>(model->value), theta, opt);
      cells = &disc->model;
    }
    auto result = ldpeff::solve_optimal_mechanism(*cells, theta, alpha);
    if (i_star) *i_star = result.i_star;
    if (out) *out = new ldpeff_channel{std::move(result.channel)};
  });
}

ldpeff_status ldpeff_binomial2_threshold(double alpha, double* c_alpha) {
  return guarded([&] {
    require(c_alpha != nullptr, "c_alpha must not be null");
    *c_alpha = ldpeff::binomial2_threshold(alpha);
  });
}

ldpeff_status ldpeff_two_step(const ldpeff_model* model, const char* config_json,
                              char** result_json) {
  return guarded([&] {
    require(model != nullptr && result_json != nullptr,
            "model and result_json must not be null");
    const nlohmann::json cfg = parse_config(config_json);
    const double theta0 = require_number(cfg, "theta0");
    const double alpha = require_number(cfg, "alpha");
    const auto n = static_cast<std::size_t>(require_number(cfg, "n"));
    if (!cfg.contains("seed"))
      throw std::invalid_argument("config JSON: missing field 'seed'");
    const auto seed = cfg.at("seed").get<std::uint64_t>();

    ldpeff::TwoStepConfig ts;
    ts.alpha = alpha;
    ts.seed = seed;
    if (cfg.contains("n1")) ts.n1_override = cfg.at("n1").get<std::size_t>();
    if (cfg.contains("n1_exponent")) ts.n1_exponent = cfg.at("n1_exponent").get<double>();
    if (cfg.contains("eps")) ts.eps_override = cfg.at("eps").get<double>();
    if (cfg.contains("clip_margin_frac"))
      ts.clip_margin_frac = cfg.at("clip_margin_frac").get<double>();
    if (cfg.contains("grid_points"))
      ts.optimizer.grid_points = cfg.at("grid_points").get<int>();

    if (!ldpeff::theta_domain(model->value).contains(theta0))
      throw std::domain_error("two_step: theta0 outside the parameter domain");

    ldpeff::SplitMix64 rng(seed);
    std::vector<double> x(n);
    if (const auto* d = std::get_if<ldpeff::DiscreteModel>(&model->value)) {
      const auto p = d->pmf(theta0);
      for (auto& xi : x) xi = d->labels()[ldpeff::sample_categorical(p, rng)];
    } else {
      const auto& c = std::get<ldpeff::ContinuousModel>(model->value);
      for (auto& xi : x) xi = c.quantile(theta0, rng.next_double_open());
    }
    const ldpeff::TwoStepResult res = ldpeff::two_step_estimate(x, model->value, ts, rng);

    nlohmann::json out;
    out["theta_tilde"] = res.theta_tilde;
    out["theta_hat"] = res.theta_hat;
    out["i_star_hat"] = res.i_star_hat;
    out["k_hat"] = res.k_hat;
    out["channel"] = channel_json_object(res.channel_hat);
    if (res.disc_map) {
      out["discretization"] = {{"lo", res.disc_map->lo},
                               {"hi", res.disc_map->hi},
                               {"interior_cells", res.disc_map->interior_cells}};
    }
    out["log"] = {{"n", res.log.n},
                  {"n1", res.log.n1},
                  {"n2", res.log.n2},
                  {"eps", res.log.eps},
                  {"q0_outputs", res.log.q0_outputs},
                  {"q0_validated", res.log.q0_validated},
                  {"theta_tilde_raw", res.log.theta_tilde_raw},
                  {"k_hat", res.log.k_hat},
                  {"lp_iterations", res.log.lp_iterations},
                  {"active_patterns", res.log.active_patterns},
                  {"channel_hat_validated", res.log.channel_hat_validated}};
    out["config"] = {{"theta0", theta0},        {"alpha", alpha},
                     {"n", n},                  {"seed", seed},
                     {"n1", res.log.n1},        {"n1_exponent", ts.n1_exponent},
                     {"eps", res.log.eps},      {"clip_margin_frac", ts.clip_margin_frac},
                     {"grid_points", ts.optimizer.grid_points}};
    *result_json = copy_string(out.dump(2));
  });
}

ldpeff_status ldpeff_simulate(const ldpeff_model* model, const char* config_json,
                              const char* csv_path, char** summary_json) {
  return guarded([&] {
    require(model != nullptr && summary_json != nullptr,
            "model and summary_json must not be null");
    const nlohmann::json cfg = parse_config(config_json);
    ldpeff::SimulationConfig sc;
    if (!cfg.contains("estimator") || !cfg.at("estimator").is_string())
      throw std::invalid_argument("config JSON: missing string field 'estimator'");
    sc.estimator = ldpeff::estimator_from_name(cfg.at("estimator").get<std::string>());
    sc.theta0 = require_number(cfg, "theta0");
    sc.alpha = require_number(cfg, "alpha");
    sc.n = static_cast<std::size_t>(require_number(cfg, "n"));
    sc.replications = static_cast<std::size_t>(require_number(cfg, "replications"));
    if (!cfg.contains("seed"))
      throw std::invalid_argument("config JSON: missing field 'seed'");
    sc.base_seed = cfg.at("seed").get<std::uint64_t>();
    if (cfg.contains("threads")) sc.threads = cfg.at("threads").get<int>();
    if (cfg.contains("tau")) sc.mom_tau = cfg.at("tau").get<double>();
    if (cfg.contains("n1_exponent"))
      sc.two_step.n1_exponent = cfg.at("n1_exponent").get<double>();

    const ldpeff::SimulationSummary summary = ldpeff::run_experiment(model->value, sc);
    if (csv_path) {
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) throw std::ios_base::failure(std::string("cannot open CSV path ") + csv_path);
      ldpeff::write_replications_csv(summary, out);
      if (!out.good())
        throw std::ios_base::failure(std::string("failed writing CSV to ") + csv_path);
    }
    *summary_json = copy_string(ldpeff::summary_to_json(sc, summary));
  });
}

ldpeff_status ldpeff_bound_table(const ldpeff_model* model, const double* thetas,
                                 size_t n_thetas, const double* alphas, size_t n_alphas,
                                 char** csv_out) {
  return guarded([&] {
    require(model != nullptr && csv_out != nullptr, "model and csv_out must not be null");
    require(thetas != nullptr && n_thetas > 0, "need at least one theta");
    require(alphas != nullptr && n_alphas > 0, "need at least one alpha");
    const auto rows = ldpeff::bound_table(model->value, {thetas, n_thetas}, {alphas, n_alphas});
    std::ostringstream os;
    ldpeff::write_bound_table_csv(rows, os);
    *csv_out = copy_string(os.str());
  });
}

}  // extern "C"
