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

#include <cmath>
#include <stdexcept>

namespace ldpeff {

namespace {

void require_matching_labels(const Channel& channel, const DiscreteModel& model) {
  if (channel.input_labels != model.labels())
    throw std::invalid_argument("channel input labels do not match model labels");
}

}  // namespace

double g_theta(std::span<const double> v, std::span<const double> p,
               std::span<const double> pdot) {
  if (v.size() != p.size() || v.size() != pdot.size())
    throw std::invalid_argument("g_theta: size mismatch");
  double vp = 0.0, vd = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < 0.0) throw std::invalid_argument("g_theta: negative direction entry");
    vp += v[j] * p[j];
    vd += v[j] * pdot[j];
  }
  if (vp == 0.0) return 0.0;
  return vd * vd / vp;
}

double fisher_info_private(const Channel& channel, const DiscreteModel& model,
                           double theta) {
  require_matching_labels(channel, model);
  const auto p = model.pmf(theta);
  const auto pd = model.pmf_dot(theta);
  double info = 0.0;
  for (std::size_t i = 0; i < channel.rows; ++i) info += g_theta(channel.row(i), p, pd);
  return info;
}

double PrivateScoreTable::variance() const {
  double m = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    m += t[i] * q[i];
    m2 += t[i] * t[i] * q[i];
  }
  return m2 - m * m;
}

PrivateScoreTable private_score(const Channel& channel, const DiscreteModel& model,
                                double theta) {
  require_matching_labels(channel, model);
  const auto p = model.pmf(theta);
  const auto pd = model.pmf_dot(theta);
  PrivateScoreTable table;
  table.t.resize(channel.rows, 0.0);
  table.q.resize(channel.rows, 0.0);
  for (std::size_t i = 0; i < channel.rows; ++i) {
    double qp = 0.0, qd = 0.0;
    for (std::size_t j = 0; j < channel.cols; ++j) {
      qp += channel(i, j) * p[j];
      qd += channel(i, j) * pd[j];
    }
    table.q[i] = qp;
    table.t[i] = (qp > 0.0) ? qd / qp : 0.0;
  }
  return table;
}

double continuity_bound(const DiscreteModel& model, double theta, double theta_prime,
                        double alpha) {
  const auto p = model.pmf(theta);
  const auto pp = model.pmf(theta_prime);
  const auto d = model.pmf_dot(theta);
  const auto dp = model.pmf_dot(theta_prime);
  double p_l1 = 0.0, d_l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p_l1 += std::fabs(p[i] - pp[i]);
    d_l1 += std::fabs(d[i] - dp[i]);
  }
  const double info = std::max({fisher_info_raw(model, theta),
                                fisher_info_raw(model, theta_prime), 1.0});
  return std::exp(2.0 * alpha) * info * (2.0 * d_l1 + 3.0 * p_l1);
}

}  // namespace ldpeff
