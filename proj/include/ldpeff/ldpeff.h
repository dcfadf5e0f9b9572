/* Copyright 2026 The ldpeff Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the ldpeff shared library.
 *
 * Models and channels are opaque handles. Every function returns a status
 * code; on failure, ldpeff_last_error() gives a thread-local message.
 * Structured inputs and outputs (two-step configuration and results,
 * simulation summaries) travel as JSON strings; strings returned by the
 * library are heap-allocated and must be released with ldpeff_string_free().
 */

#ifndef LDPEFF_LDPEFF_H
#define LDPEFF_LDPEFF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ldpeff_status {
  LDPEFF_OK = 0,
  LDPEFF_ERR_INVALID_ARGUMENT = 1,
  LDPEFF_ERR_DOMAIN = 2,
  LDPEFF_ERR_RESOURCE_LIMIT = 3,
  LDPEFF_ERR_NUMERIC = 4,
  LDPEFF_ERR_IO = 5,
  LDPEFF_ERR_INTERNAL = 6
} ldpeff_status;

typedef struct ldpeff_model ldpeff_model;
typedef struct ldpeff_channel ldpeff_channel;

const char* ldpeff_version(void);

/* Message for the most recent failure on this thread ("" if none). */
const char* ldpeff_last_error(void);

void ldpeff_string_free(char* s);

/* Model spec strings: "bernoulli", "binomial:m", "gaussian-location:sigma". */
ldpeff_status ldpeff_model_create(const char* spec, ldpeff_model** out);
void ldpeff_model_free(ldpeff_model* model);
ldpeff_status ldpeff_model_theta_domain(const ldpeff_model* model, double* lo, double* hi);
/* Number of sample-space points; 0 for continuous models. */
ldpeff_status ldpeff_model_size(const ldpeff_model* model, size_t* k);
ldpeff_status ldpeff_fisher_raw(const ldpeff_model* model, double theta, double* out);

ldpeff_status ldpeff_channel_randomized_response(size_t k, double alpha,
                                                 ldpeff_channel** out);
ldpeff_status ldpeff_channel_from_json(const char* json, ldpeff_channel** out);
ldpeff_status ldpeff_channel_to_json(const ldpeff_channel* channel, char** json_out);
void ldpeff_channel_free(ldpeff_channel* channel);

/* *pass is 1 iff the channel satisfies the alpha-privacy constraints within
 * tolerance; on failure a human-readable report is placed in *report_out
 * (may be NULL if not wanted). The call itself succeeds either way. */
ldpeff_status ldpeff_channel_validate(const ldpeff_channel* channel, double alpha,
                                      int* pass, char** report_out);

ldpeff_status ldpeff_fisher_private(const ldpeff_channel* channel,
                                    const ldpeff_model* model, double theta,
                                    double* out);

/* Maximal privatized Fisher information at (theta, alpha) and a channel
 * attaining it. Continuous models are discretized first with tolerance eps
 * (eps <= 0 selects the default 0.05). Either output may be NULL. */
ldpeff_status ldpeff_solve_optimal(const ldpeff_model* model, double theta, double alpha,
                                   double eps, double* i_star, ldpeff_channel** out);

ldpeff_status ldpeff_binomial2_threshold(double alpha, double* c_alpha);

/* Runs the two-step estimation pipeline on data simulated from the model.
 * config_json keys: theta0, alpha, n, seed (required); n1, n1_exponent, eps,
 * clip_margin_frac, grid_points (optional). Returns a JSON document with the
 * estimates, the estimated channel, and a per-stage log. */
ldpeff_status ldpeff_two_step(const ldpeff_model* model, const char* config_json,
                              char** result_json);

/* Monte Carlo experiment. config_json keys: estimator ("two-step", "warner",
 * "mom", "private-mle"), theta0, alpha, n, replications, seed (required);
 * threads, tau, n1_exponent (optional). Writes one CSV row per replication
 * to csv_path (skipped when NULL) and returns the summary JSON. */
ldpeff_status ldpeff_simulate(const ldpeff_model* model, const char* config_json,
                              const char* csv_path, char** summary_json);

/* CSV table of optimal information over the grid:
 * header theta,alpha,i_star,var_bound,i_raw,i_rr. */
ldpeff_status ldpeff_bound_table(const ldpeff_model* model, const double* thetas,
                                 size_t n_thetas, const double* alphas, size_t n_alphas,
                                 char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* LDPEFF_LDPEFF_H */
