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

#include "ldpeff/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ldpeff {

namespace {
constexpr double kTol = 1e-12;
}

int Channel::input_index(double label) const {
  for (std::size_t j = 0; j < input_labels.size(); ++j)
    if (input_labels[j] == label) return static_cast<int>(j);
  return -1;
}

int Channel::output_index(double label) const {
  for (std::size_t i = 0; i < output_labels.size(); ++i)
    if (output_labels[i] == label) return static_cast<int>(i);
  return -1;
}

ValidationReport validate_alpha_dp(std::span<const double> matrix, std::size_t rows,
                                   std::size_t cols, double alpha) {
  ValidationReport report;
  if (matrix.size() != rows * cols || rows == 0 || cols == 0) {
    report.pass = false;
    report.message = "matrix shape does not match rows*cols";
    return report;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (matrix[i * cols + j] < -kTol) {
        report.pass = false;
        report.row = i;
        report.col_a = j;
        report.col_b = j;
        std::ostringstream os;
        os << "negative entry at (" << i << ", " << j << ")";
        report.message = os.str();
        return report;
      }
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += matrix[i * cols + j];
    if (std::fabs(s - 1.0) > kTol) {
      report.pass = false;
      report.col_a = j;
      report.col_b = j;
      std::ostringstream os;
      os << "column " << j << " sums to " << s << " (expected 1)";
      report.message = os.str();
      return report;
    }
  }
  const double bound = std::exp(alpha);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t j2 = 0; j2 < cols; ++j2) {
        if (matrix[i * cols + j] > bound * matrix[i * cols + j2] + kTol) {
          report.pass = false;
          report.row = i;
          report.col_a = j;
          report.col_b = j2;
          std::ostringstream os;
          os << "row " << i << ": entry for input " << j << " exceeds e^alpha times entry for input "
             << j2 << " (" << matrix[i * cols + j] << " vs " << matrix[i * cols + j2] << ")";
          report.message = os.str();
          return report;
        }
      }
    }
  }
  report.message = "pass";
  return report;
}

ValidationReport validate_alpha_dp(const Channel& channel) {
  return validate_alpha_dp(channel.matrix, channel.rows, channel.cols, channel.alpha);
}

ValidationReport validate_alpha_dp(const Channel& channel, double alpha) {
  return validate_alpha_dp(channel.matrix, channel.rows, channel.cols, alpha);
}

Channel randomized_response(std::size_t k, double alpha, std::vector<double> labels) {
  if (k < 2) throw std::invalid_argument("randomized_response: k must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("randomized_response: alpha must be > 0");
  if (labels.empty()) {
    labels.resize(k);
    for (std::size_t i = 0; i < k; ++i) labels[i] = static_cast<double>(i);
  }
  if (labels.size() != k)
    throw std::invalid_argument("randomized_response: labels size must equal k");
  const double ealpha = std::exp(alpha);
  const double denom = ealpha + static_cast<double>(k) - 1.0;
  Channel c;
  c.rows = c.cols = k;
  c.alpha = alpha;
  c.input_labels = labels;
  c.output_labels = std::move(labels);
  c.matrix.assign(k * k, 1.0 / denom);
  for (std::size_t i = 0; i < k; ++i) c.at(i, i) = ealpha / denom;
  return c;
}

Channel compose_post(const Channel& t, const Channel& q) {
  if (t.cols != q.rows)
    throw std::invalid_argument("compose_post: inner dimensions do not match");
  for (std::size_t j = 0; j < t.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.rows; ++i) s += t(i, j);
    if (std::fabs(s - 1.0) > 1e-9)
      throw std::invalid_argument("compose_post: post-processing kernel is not column-stochastic");
  }
  Channel out;
  out.rows = t.rows;
  out.cols = q.cols;
  out.alpha = q.alpha;
  out.input_labels = q.input_labels;
  out.output_labels = t.output_labels;
  out.matrix.assign(out.rows * out.cols, 0.0);
  for (std::size_t i = 0; i < t.rows; ++i)
    for (std::size_t m = 0; m < q.rows; ++m) {
      const double tim = t(i, m);
      if (tim == 0.0) continue;
      for (std::size_t j = 0; j < q.cols; ++j) out.at(i, j) += tim * q(m, j);
    }
  return out;
}

Channel compose_pre(const Channel& q, std::span<const int> t_map,
                    std::vector<double> new_input_labels) {
  if (t_map.size() != new_input_labels.size())
    throw std::invalid_argument("compose_pre: map and label sizes differ");
  if (t_map.empty()) throw std::invalid_argument("compose_pre: empty input domain");
  Channel out;
  out.rows = q.rows;
  out.cols = t_map.size();
  out.alpha = q.alpha;
  out.output_labels = q.output_labels;
  out.input_labels = std::move(new_input_labels);
  out.matrix.assign(out.rows * out.cols, 0.0);
  for (std::size_t j = 0; j < t_map.size(); ++j) {
    const int src = t_map[j];
    if (src < 0 || static_cast<std::size_t>(src) >= q.cols)
      throw std::invalid_argument("compose_pre: map image outside the channel's input domain");
    for (std::size_t i = 0; i < q.rows; ++i) out.at(i, j) = q(i, static_cast<std::size_t>(src));
  }
  return out;
}

double sample(const Channel& channel, double x_label, SplitMix64& rng) {
  const int j = channel.input_index(x_label);
  if (j < 0) throw std::invalid_argument("sample: unknown input label");
  // Column walk; zero rows carry no mass and are never drawn.
  std::vector<double> col(channel.rows);
  for (std::size_t i = 0; i < channel.rows; ++i) col[i] = channel(i, static_cast<std::size_t>(j));
  const std::size_t i = sample_categorical(col, rng);
  return channel.output_labels[i];
}

Channel strip_zero_rows(const Channel& channel) {
  Channel out;
  out.cols = channel.cols;
  out.alpha = channel.alpha;
  out.input_labels = channel.input_labels;
  for (std::size_t i = 0; i < channel.rows; ++i) {
    bool all_zero = true;
    for (std::size_t j = 0; j < channel.cols; ++j)
      if (channel(i, j) != 0.0) {
        all_zero = false;
        break;
      }
    if (all_zero) continue;
    out.output_labels.push_back(channel.output_labels[i]);
    for (std::size_t j = 0; j < channel.cols; ++j) out.matrix.push_back(channel(i, j));
  }
  out.rows = out.output_labels.size();
  if (out.rows == 0) throw std::invalid_argument("strip_zero_rows: channel has no nonzero rows");
  return out;
}

std::string channel_to_json(const Channel& channel) {
  nlohmann::json j;
  j["alpha"] = channel.alpha;
  j["input_labels"] = channel.input_labels;
  j["output_labels"] = channel.output_labels;
  j["matrix"] = channel.matrix;  // row-major
  return j.dump(2);
}

Channel channel_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("channel JSON parse error: ") + e.what());
  }
  Channel c;
  try {
    c.alpha = j.at("alpha").get<double>();
    c.input_labels = j.at("input_labels").get<std::vector<double>>();
    c.output_labels = j.at("output_labels").get<std::vector<double>>();
    c.matrix = j.at("matrix").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("channel JSON missing field: ") + e.what());
  }
  c.rows = c.output_labels.size();
  c.cols = c.input_labels.size();
  if (c.matrix.size() != c.rows * c.cols)
    throw std::invalid_argument("channel JSON: matrix size does not match labels");
  return c;
}

std::vector<double> laplace_sanitize(std::span<const double> g_value,
                                     const LaplaceMechanism& mech, SplitMix64& rng) {
  if (g_value.size() != mech.dim)
    throw std::invalid_argument("laplace_sanitize: vector dimension does not match mechanism");
  double l1 = 0.0;
  for (double v : g_value) l1 += std::fabs(v);
  const bool keep = l1 <= mech.tau;
  std::vector<double> out(g_value.size());
  for (std::size_t i = 0; i < g_value.size(); ++i)
    out[i] = (keep ? g_value[i] : 0.0) + sample_laplace(mech.scale(), rng);
  return out;
}

}  // namespace ldpeff
