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

// Command-line front end. Links only the C API of the ldpeff shared library;
// argument handling, config-file merging, and run manifests live here.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldpeff/ldpeff.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct StringDeleter {
  void operator()(char* s) const { ldpeff_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct ModelDeleter {
  void operator()(ldpeff_model* m) const { ldpeff_model_free(m); }
};
using ModelHandle = std::unique_ptr<ldpeff_model, ModelDeleter>;

struct ChannelDeleter {
  void operator()(ldpeff_channel* c) const { ldpeff_channel_free(c); }
};
using ChannelHandle = std::unique_ptr<ldpeff_channel, ChannelDeleter>;

// Library usage errors map to exit 2, everything else to exit 1.
[[noreturn]] void fail(ldpeff_status status) {
  std::cerr << "error: " << ldpeff_last_error() << "\n";
  const bool usage = status == LDPEFF_ERR_INVALID_ARGUMENT || status == LDPEFF_ERR_DOMAIN;
  std::exit(usage ? kExitUsage : kExitRuntime);
}

void check(ldpeff_status status) {
  if (status != LDPEFF_OK) fail(status);
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(kExitUsage);
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json make_manifest(const std::string& subcommand, const json& resolved_config,
                   std::optional<std::uint64_t> seed) {
  json m;
  m["subcommand"] = subcommand;
  m["config"] = resolved_config;
  m["library_version"] = ldpeff_version();
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["created_at"] = utc_timestamp();
  return m;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) usage_error("cannot open output file " + path);
  out << text;
  if (!out.good()) {
    std::cerr << "error: failed writing " << path << "\n";
    std::exit(kExitRuntime);
  }
}

std::string read_text_file(const std::string& path, const char* flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) usage_error(std::string(flag) + ": cannot read file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ModelHandle open_model(const std::string& spec) {
  ldpeff_model* raw = nullptr;
  check(ldpeff_model_create(spec.c_str(), &raw));
  return ModelHandle(raw);
}

// Resolution order: command-line flag, then config-file entry, then default.
class ConfigResolver {
 public:
  ConfigResolver(CLI::App* cmd, std::string config_path) : cmd_(cmd) {
    if (!config_path.empty()) {
      try {
        file_ = json::parse(read_text_file(config_path, "--config"));
      } catch (const json::exception& e) {
        usage_error(std::string("--config: invalid JSON: ") + e.what());
      }
      if (!file_.is_object()) usage_error("--config: top-level value must be an object");
    }
  }

  template <typename T>
  T resolve(const std::string& flag, const std::string& key, const T& flag_value,
            const T& fallback) const {
    if (cmd_->count(flag) > 0) return flag_value;
    if (file_.contains(key)) {
      try {
        return file_.at(key).get<T>();
      } catch (const json::exception&) {
        usage_error("--config: field '" + key + "' has the wrong type");
      }
    }
    return fallback;
  }

  bool has(const std::string& flag, const std::string& key) const {
    return cmd_->count(flag) > 0 || file_.contains(key);
  }

 private:
  CLI::App* cmd_;
  json file_;
};

int threads_from_env() {
  const char* env = std::getenv("LDP_EFF_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

struct CommonModelFlags {
  std::string model;
  std::string config_path;
};

void add_model_flags(CLI::App* cmd, CommonModelFlags& flags) {
  cmd->add_option("--model", flags.model,
                  "model spec: bernoulli | binomial:m | gaussian-location:sigma");
  cmd->add_option("--config", flags.config_path, "JSON config file (flags take precedence)");
}

std::string resolved_model(const ConfigResolver& resolver, const CommonModelFlags& flags) {
  const std::string spec =
      resolver.resolve<std::string>("--model", "model", flags.model, "");
  if (spec.empty()) usage_error("--model is required");
  return spec;
}

// ---------------------------------------------------------------------------
// Subcommand implementations. Each returns the process exit code.

int run_fisher(CLI::App* cmd, const CommonModelFlags& flags,
               const std::vector<double>& thetas_flag, double alpha_flag,
               const std::string& channel_path) {
  ConfigResolver resolver(cmd, flags.config_path);
  const std::string spec = resolved_model(resolver, flags);
  const double alpha = resolver.resolve("--alpha", "alpha", alpha_flag, 0.0);
  const auto thetas =
      resolver.resolve<std::vector<double>>("--theta", "theta", thetas_flag, {});
  if (!(alpha > 0.0)) usage_error("--alpha must be positive");
  if (thetas.empty()) usage_error("--theta requires at least one value");

  ModelHandle model = open_model(spec);
  ChannelHandle channel;
  if (!channel_path.empty()) {
    ldpeff_channel* raw = nullptr;
    check(ldpeff_channel_from_json(read_text_file(channel_path, "--channel").c_str(), &raw));
    channel.reset(raw);
  }
  std::cout << "theta,alpha,raw,private,ratio\n";
  for (double theta : thetas) {
    double raw_info = 0.0;
    check(ldpeff_fisher_raw(model.get(), theta, &raw_info));
    double private_info = 0.0;
    if (channel) {
      check(ldpeff_fisher_private(channel.get(), model.get(), theta, &private_info));
    } else {
      check(ldpeff_solve_optimal(model.get(), theta, alpha, 0.0, &private_info, nullptr));
    }
    const double ratio = raw_info > 0.0 ? private_info / raw_info : 0.0;
    std::cout << format17(theta) << ',' << format17(alpha) << ',' << format17(raw_info) << ','
              << format17(private_info) << ',' << format17(ratio) << "\n";
  }
  return kExitOk;
}

int run_optimize(CLI::App* cmd, const CommonModelFlags& flags, double theta_flag,
                 double alpha_flag, double eps_flag, const std::string& json_path) {
  ConfigResolver resolver(cmd, flags.config_path);
  const std::string spec = resolved_model(resolver, flags);
  const double theta = resolver.resolve("--theta", "theta", theta_flag, 0.5);
  const double alpha = resolver.resolve("--alpha", "alpha", alpha_flag, 0.0);
  const double eps = resolver.resolve("--eps", "eps", eps_flag, 0.0);
  if (!(alpha > 0.0)) usage_error("--alpha must be positive");

  ModelHandle model = open_model(spec);
  double i_star = 0.0;
  ldpeff_channel* raw = nullptr;
  check(ldpeff_solve_optimal(model.get(), theta, alpha, eps, &i_star, &raw));
  ChannelHandle channel(raw);
  std::cout << "I*=" << format17(i_star) << "\n";
  if (!json_path.empty()) {
    char* text = nullptr;
    check(ldpeff_channel_to_json(channel.get(), &text));
    CString owned(text);
    json doc = json::parse(owned.get());
    const json config = {{"model", spec}, {"theta", theta}, {"alpha", alpha}, {"eps", eps}};
    doc["manifest"] = make_manifest("optimize", config, std::nullopt);
    doc["i_star"] = i_star;
    write_text_file(json_path, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int run_two_step(CLI::App* cmd, const CommonModelFlags& flags, double theta0_flag,
                 double alpha_flag, std::uint64_t n_flag, double n1_exp_flag,
                 std::uint64_t n1_flag, double eps_flag, std::uint64_t seed_flag,
                 const std::string& out_path) {
  ConfigResolver resolver(cmd, flags.config_path);
  const std::string spec = resolved_model(resolver, flags);
  if (!resolver.has("--seed", "seed"))
    usage_error("--seed is required: stochastic subcommands refuse to run unseeded");
  json config;
  config["theta0"] = resolver.resolve("--theta0", "theta0", theta0_flag, 0.5);
  config["alpha"] = resolver.resolve("--alpha", "alpha", alpha_flag, 1.0);
  config["n"] = resolver.resolve("--n", "n", n_flag, std::uint64_t{0});
  config["seed"] = resolver.resolve("--seed", "seed", seed_flag, std::uint64_t{0});
  config["n1_exponent"] = resolver.resolve("--n1-exp", "n1_exponent", n1_exp_flag, 0.7);
  if (resolver.has("--n1", "n1"))
    config["n1"] = resolver.resolve("--n1", "n1", n1_flag, std::uint64_t{0});
  if (resolver.has("--eps", "eps"))
    config["eps"] = resolver.resolve("--eps", "eps", eps_flag, 0.0);
  if (config["n"].get<std::uint64_t>() == 0) usage_error("--n is required");
  if (out_path.empty()) usage_error("--out is required");

  ModelHandle model = open_model(spec);
  char* raw = nullptr;
  check(ldpeff_two_step(model.get(), config.dump().c_str(), &raw));
  CString owned(raw);
  json doc = json::parse(owned.get());
  json manifest_config = doc["config"];
  manifest_config["model"] = spec;
  doc["manifest"] =
      make_manifest("two-step", manifest_config, config["seed"].get<std::uint64_t>());
  write_text_file(out_path, doc.dump(2) + "\n");
  std::cout << "theta_tilde=" << format17(doc["theta_tilde"].get<double>())
            << " theta_hat=" << format17(doc["theta_hat"].get<double>())
            << " k_hat=" << doc["k_hat"].get<std::uint64_t>()
            << " i_star_hat=" << format17(doc["i_star_hat"].get<double>()) << "\n";
  return kExitOk;
}

int run_simulate(CLI::App* cmd, const CommonModelFlags& flags,
                 const std::string& estimator_flag, double theta0_flag, double alpha_flag,
                 std::uint64_t n_flag, std::uint64_t reps_flag, std::uint64_t seed_flag,
                 int threads_flag, double tau_flag, double n1_exp_flag,
                 const std::string& out_base) {
  ConfigResolver resolver(cmd, flags.config_path);
  const std::string spec = resolved_model(resolver, flags);
  if (!resolver.has("--seed", "seed"))
    usage_error("--seed is required: stochastic subcommands refuse to run unseeded");
  if (out_base.empty()) usage_error("--out is required");

  json config;
  config["estimator"] =
      resolver.resolve<std::string>("--estimator", "estimator", estimator_flag, "two-step");
  config["theta0"] = resolver.resolve("--theta0", "theta0", theta0_flag, 0.5);
  config["alpha"] = resolver.resolve("--alpha", "alpha", alpha_flag, 1.0);
  config["n"] = resolver.resolve("--n", "n", n_flag, std::uint64_t{1000});
  config["replications"] = resolver.resolve("--reps", "replications", reps_flag, std::uint64_t{100});
  config["seed"] = resolver.resolve("--seed", "seed", seed_flag, std::uint64_t{0});
  config["threads"] = resolver.resolve("--threads", "threads", threads_flag, threads_from_env());
  if (resolver.has("--tau", "tau")) config["tau"] = resolver.resolve("--tau", "tau", tau_flag, 0.0);
  if (resolver.has("--n1-exp", "n1_exponent"))
    config["n1_exponent"] = resolver.resolve("--n1-exp", "n1_exponent", n1_exp_flag, 0.7);

  ModelHandle model = open_model(spec);
  const std::string csv_path = out_base + ".csv";
  char* raw = nullptr;
  check(ldpeff_simulate(model.get(), config.dump().c_str(), csv_path.c_str(), &raw));
  CString owned(raw);
  json summary = json::parse(owned.get());
  json manifest_config = summary["config"];
  manifest_config["model"] = spec;
  manifest_config["csv"] = csv_path;
  summary["manifest"] =
      make_manifest("simulate", manifest_config, config["seed"].get<std::uint64_t>());
  write_text_file(out_base + ".summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int run_bound_table(CLI::App* cmd, const CommonModelFlags& flags,
                    const std::vector<double>& thetas_flag,
                    const std::vector<double>& alphas_flag, const std::string& out_path) {
  ConfigResolver resolver(cmd, flags.config_path);
  const std::string spec = resolved_model(resolver, flags);
  const auto thetas =
      resolver.resolve<std::vector<double>>("--thetas", "thetas", thetas_flag, {});
  const auto alphas =
      resolver.resolve<std::vector<double>>("--alphas", "alphas", alphas_flag, {});
  if (thetas.empty()) usage_error("--thetas requires at least one value");
  if (alphas.empty()) usage_error("--alphas requires at least one value");

  ModelHandle model = open_model(spec);
  char* raw = nullptr;
  check(ldpeff_bound_table(model.get(), thetas.data(), thetas.size(), alphas.data(),
                           alphas.size(), &raw));
  CString owned(raw);
  if (out_path.empty()) {
    std::cout << owned.get();
  } else {
    write_text_file(out_path, owned.get());
    const json config = {{"model", spec}, {"thetas", thetas}, {"alphas", alphas}};
    write_text_file(out_path + ".manifest.json",
                    make_manifest("bound-table", config, std::nullopt).dump(2) + "\n");
  }
  return kExitOk;
}

int run_validate(const std::string& channel_path, double alpha) {
  if (channel_path.empty()) usage_error("--channel is required");
  if (!(alpha > 0.0)) usage_error("--alpha must be positive");
  ldpeff_channel* raw = nullptr;
  check(ldpeff_channel_from_json(read_text_file(channel_path, "--channel").c_str(), &raw));
  ChannelHandle channel(raw);
  int pass = 0;
  char* report = nullptr;
  check(ldpeff_channel_validate(channel.get(), alpha, &pass, &report));
  CString owned(report);
  if (pass) {
    std::cout << "pass\n";
    return kExitOk;
  }
  std::cout << "violation: " << owned.get() << "\n";
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal local-differential-privacy mechanisms and efficient two-step estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ldpeff_version()));

  // fisher
  auto* fisher_cmd = app.add_subcommand(
      "fisher", "print raw/private Fisher information rows for requested thetas");
  CommonModelFlags fisher_flags;
  add_model_flags(fisher_cmd, fisher_flags);
  std::vector<double> fisher_thetas;
  double fisher_alpha = 0.0;
  std::string fisher_channel;
  fisher_cmd->add_option("--theta", fisher_thetas, "theta values")->delimiter(',');
  fisher_cmd->add_option("--alpha", fisher_alpha, "privacy budget");
  fisher_cmd->add_option("--channel", fisher_channel,
                         "channel JSON to evaluate (default: optimal mechanism)");

  // optimize
  auto* optimize_cmd =
      app.add_subcommand("optimize", "solve for the information-optimal channel");
  CommonModelFlags optimize_flags;
  add_model_flags(optimize_cmd, optimize_flags);
  double optimize_theta = 0.5, optimize_alpha = 0.0, optimize_eps = 0.0;
  std::string optimize_json;
  optimize_cmd->add_option("--theta", optimize_theta, "parameter value");
  optimize_cmd->add_option("--alpha", optimize_alpha, "privacy budget");
  optimize_cmd->add_option("--eps", optimize_eps,
                           "discretization tolerance (continuous models)");
  optimize_cmd->add_option("--json", optimize_json, "write the channel JSON here");

  // two-step
  auto* two_step_cmd =
      app.add_subcommand("two-step", "run the two-step estimator on simulated data");
  CommonModelFlags two_step_flags;
  add_model_flags(two_step_cmd, two_step_flags);
  double ts_theta0 = 0.5, ts_alpha = 1.0, ts_n1_exp = 0.7, ts_eps = 0.0;
  std::uint64_t ts_n = 0, ts_n1 = 0, ts_seed = 0;
  std::string ts_out;
  two_step_cmd->add_option("--theta0", ts_theta0, "true parameter for data generation");
  two_step_cmd->add_option("--alpha", ts_alpha, "privacy budget");
  two_step_cmd->add_option("--n", ts_n, "total sample size");
  two_step_cmd->add_option("--n1-exp", ts_n1_exp, "first-group exponent: n1 = ceil(n^exp)");
  two_step_cmd->add_option("--n1", ts_n1, "explicit first-group size (overrides --n1-exp)");
  two_step_cmd->add_option("--eps", ts_eps, "discretization tolerance override");
  two_step_cmd->add_option("--seed", ts_seed, "rng seed (required)");
  two_step_cmd->add_option("--out", ts_out, "result JSON path");

  // simulate
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo replications of an estimator");
  CommonModelFlags simulate_flags;
  add_model_flags(simulate_cmd, simulate_flags);
  std::string sim_estimator = "two-step", sim_out;
  double sim_theta0 = 0.5, sim_alpha = 1.0, sim_tau = 0.0, sim_n1_exp = 0.7;
  std::uint64_t sim_n = 1000, sim_reps = 100, sim_seed = 0;
  int sim_threads = 1;
  simulate_cmd->add_option("--estimator", sim_estimator,
                           "two-step | warner | mom | private-mle");
  simulate_cmd->add_option("--theta0", sim_theta0, "true parameter");
  simulate_cmd->add_option("--alpha", sim_alpha, "privacy budget");
  simulate_cmd->add_option("--n", sim_n, "sample size per replication");
  simulate_cmd->add_option("--reps", sim_reps, "number of replications");
  simulate_cmd->add_option("--seed", sim_seed, "base seed (required)");
  simulate_cmd->add_option("--threads", sim_threads,
                           "worker threads (env LDP_EFF_THREADS as fallback)");
  simulate_cmd->add_option("--tau", sim_tau, "moment truncation radius (mom estimator)");
  simulate_cmd->add_option("--n1-exp", sim_n1_exp, "two-step first-group exponent");
  simulate_cmd->add_option("--out", sim_out, "output base path (writes .csv and .summary.json)");

  // bound-table
  auto* bound_cmd =
      app.add_subcommand("bound-table", "optimal-information table over a grid");
  CommonModelFlags bound_flags;
  add_model_flags(bound_cmd, bound_flags);
  std::vector<double> bound_thetas, bound_alphas;
  std::string bound_out;
  bound_cmd->add_option("--thetas", bound_thetas, "theta grid")->delimiter(',');
  bound_cmd->add_option("--alphas", bound_alphas, "alpha grid")->delimiter(',');
  bound_cmd->add_option("--out", bound_out, "CSV path (default: stdout)");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check a channel JSON for alpha-privacy");
  std::string validate_channel;
  double validate_alpha = 0.0;
  validate_cmd->add_option("--channel", validate_channel, "channel JSON file");
  validate_cmd->add_option("--alpha", validate_alpha, "privacy budget to check against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fisher_cmd->parsed())
      return run_fisher(fisher_cmd, fisher_flags, fisher_thetas, fisher_alpha, fisher_channel);
    if (optimize_cmd->parsed())
      return run_optimize(optimize_cmd, optimize_flags, optimize_theta, optimize_alpha,
                          optimize_eps, optimize_json);
    if (two_step_cmd->parsed())
      return run_two_step(two_step_cmd, two_step_flags, ts_theta0, ts_alpha, ts_n, ts_n1_exp,
                          ts_n1, ts_eps, ts_seed, ts_out);
    if (simulate_cmd->parsed())
      return run_simulate(simulate_cmd, simulate_flags, sim_estimator, sim_theta0, sim_alpha,
                          sim_n, sim_reps, sim_seed, sim_threads, sim_tau, sim_n1_exp, sim_out);
    if (bound_cmd->parsed())
      return run_bound_table(bound_cmd, bound_flags, bound_thetas, bound_alphas, bound_out);
    if (validate_cmd->parsed()) return run_validate(validate_channel, validate_alpha);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
