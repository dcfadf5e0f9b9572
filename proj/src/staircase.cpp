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

#include "ldpeff/staircase.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ldpeff/errors.hpp"

namespace ldpeff {

std::vector<double> StaircasePattern::direction(std::size_t k, double alpha) const {
  const double ealpha = std::exp(alpha);
  std::vector<double> v(k, 1.0);
  for (std::size_t j = 0; j < k; ++j)
    if (mask & (1u << j)) v[j] = ealpha;
  return v;
}

std::vector<StaircasePattern> enumerate_patterns(std::size_t k, double alpha) {
  if (k < 2) throw std::invalid_argument("enumerate_patterns: k must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("enumerate_patterns: alpha must be > 0");
  if (k > kMaxStaircaseInputs) {
    std::ostringstream os;
    os << "enumerate_patterns: k=" << k << " exceeds the cap of " << kMaxStaircaseInputs
       << " inputs (2^k patterns); use a coarser discretization";
    throw ResourceLimitError(os.str());
  }
  std::vector<StaircasePattern> patterns(std::size_t{1} << k);
  for (std::uint32_t s = 0; s < patterns.size(); ++s) patterns[s].mask = s;
  return patterns;
}

namespace {

// Solves A x = b by Gaussian elimination with partial pivoting; A is n x n
// row-major and both arguments are consumed. Returns false on singularity.
bool solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& x) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::fabs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double cand = std::fabs(a[r * n + col]);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best < 1e-13) return false;
    if (pivot != col) {
      for (std::size_t j = col; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t j = ri + 1; j < n; ++j) acc -= a[ri * n + j] * x[j];
    x[ri] = acc / a[ri * n + ri];
  }
  return true;
}

// The LP  max sum_S t_S g(v_S)  s.t.  sum_S t_S v_S = 1, t >= 0,  where
// v_S = 1 + (e^a - 1) 1_S. Columns are generated from the bitmask, and
// inner products against pattern columns reduce to subset sums:
//   v_S . w = sum(w) + (e^a - 1) * sum_{j in S} w_j.
class StaircaseSimplex {
 public:
  StaircaseSimplex(std::size_t k, double alpha, std::span<const double> p,
                   std::span<const double> pdot)
      : k_(k),
        n_pat_(std::size_t{1} << k),
        em1_(std::exp(alpha) - 1.0),
        p_(p.begin(), p.end()),
        d_(pdot.begin(), pdot.end()),
        subset_p_(n_pat_, 0.0),
        subset_d_(n_pat_, 0.0),
        subset_y_(n_pat_, 0.0),
        in_basis_(n_pat_, 0) {
    p_total_ = std::accumulate(p_.begin(), p_.end(), 0.0);
    d_total_ = std::accumulate(d_.begin(), d_.end(), 0.0);
    for (std::size_t s = 1; s < n_pat_; ++s) {
      const std::size_t low = std::countr_zero(s);
      const std::size_t rest = s & (s - 1);
      subset_p_[s] = subset_p_[rest] + p_[low];
      subset_d_[s] = subset_d_[rest] + d_[low];
    }
    c_max_ = 0.0;
    for (std::size_t s = 0; s < n_pat_; ++s) c_max_ = std::max(c_max_, objective(s));
  }

  double objective(std::size_t mask) const {
    const double vp = p_total_ + em1_ * subset_p_[mask];
    if (vp <= 0.0) return 0.0;
    const double vd = d_total_ + em1_ * subset_d_[mask];
    return vd * vd / vp;
  }

  double column_entry(std::size_t mask, std::size_t j) const {
    return (mask & (std::size_t{1} << j)) ? (1.0 + em1_) : 1.0;
  }

  struct Solution {
    std::vector<std::uint32_t> basis_masks;
    std::vector<double> weights;
    std::size_t iterations = 0;
  };

  Solution run() {
    // Singleton patterns with equal weight always satisfy the constraints:
    // sum_j t (1 + (e^a - 1) 1_{j}) = t (e^a + k - 1) 1 = 1.
    std::vector<std::size_t> basis(k_);
    std::vector<double> weights(k_, 1.0 / (em1_ + 1.0 + static_cast<double>(k_) - 1.0));
    for (std::size_t j = 0; j < k_; ++j) {
      basis[j] = std::size_t{1} << j;
      in_basis_[basis[j]] = 1;
    }
    const double rc_tol = 1e-11 * std::max(c_max_, 1e-300);
    const std::size_t iteration_cap = 10 * n_pat_;
    std::size_t it = 0;
    for (; it < iteration_cap; ++it) {
      // Dual prices: B^T y = c_B.
      std::vector<double> bt(k_ * k_), cb(k_);
      for (std::size_t r = 0; r < k_; ++r) {
        cb[r] = objective(basis[r]);
        for (std::size_t j = 0; j < k_; ++j) bt[j * k_ + r] = column_entry(basis[r], j);
      }
      std::vector<double> y;
      {
        // bt currently holds B with B(j, r) = v_{basis[r]}(j); transpose for duals.
        std::vector<double> btt(k_ * k_);
        for (std::size_t r = 0; r < k_; ++r)
          for (std::size_t j = 0; j < k_; ++j) btt[r * k_ + j] = bt[j * k_ + r];
        if (!solve_linear(btt, cb, k_, y))
          throw NumericError("staircase simplex: singular basis (dual solve)");
      }
      const double y_total = std::accumulate(y.begin(), y.end(), 0.0);

      // Bland's rule: first pattern (in mask order) with positive reduced
      // cost enters. Subset sums of y are formed incrementally on the scan.
      std::size_t entering = n_pat_;
      subset_y_[0] = 0.0;
      if (!in_basis_[0] && objective(0) - y_total > rc_tol) entering = 0;
      for (std::size_t s = 1; entering == n_pat_ && s < n_pat_; ++s) {
        subset_y_[s] = subset_y_[s & (s - 1)] + y[std::countr_zero(s)];
        if (in_basis_[s]) continue;
        const double rc = objective(s) - (y_total + em1_ * subset_y_[s]);
        if (rc > rc_tol) entering = s;
      }
      if (entering == n_pat_) break;  // optimal

      // Direction: B d = v_entering.
      std::vector<double> rhs(k_), dir;
      for (std::size_t j = 0; j < k_; ++j) rhs[j] = column_entry(entering, j);
      if (!solve_linear(bt, rhs, k_, dir))
        throw NumericError("staircase simplex: singular basis (direction solve)");

      // Ratio test; ties resolved toward the smallest leaving mask.
      double lambda = -1.0;
      for (std::size_t r = 0; r < k_; ++r) {
        if (dir[r] > 1e-11) {
          const double ratio = weights[r] / dir[r];
          if (lambda < 0.0 || ratio < lambda) lambda = ratio;
        }
      }
      if (lambda < 0.0)
        throw NumericError("staircase simplex: unbounded direction (invalid LP data)");
      std::size_t leaving = k_;
      for (std::size_t r = 0; r < k_; ++r) {
        if (dir[r] > 1e-11 && weights[r] / dir[r] <= lambda + 1e-12 * (1.0 + lambda)) {
          if (leaving == k_ || basis[r] < basis[leaving]) leaving = r;
        }
      }

      for (std::size_t r = 0; r < k_; ++r) {
        weights[r] -= lambda * dir[r];
        if (weights[r] < 0.0) {
          if (weights[r] < -1e-9)
            throw NumericError("staircase simplex: negative basic weight");
          weights[r] = 0.0;
        }
      }
      in_basis_[basis[leaving]] = 0;
      in_basis_[entering] = 1;
      basis[leaving] = entering;
      weights[leaving] = lambda;
    }
    if (it >= iteration_cap) {
      std::ostringstream os;
      os << "staircase simplex: iteration cap " << iteration_cap << " exceeded at k=" << k_;
      throw NumericError(os.str());
    }
    // Re-solve the weights from the final basis: the incremental updates
    // above accumulate rounding drift over many pivots.
    {
      std::vector<double> bmat(k_ * k_), ones(k_, 1.0), resolved;
      for (std::size_t r = 0; r < k_; ++r)
        for (std::size_t j = 0; j < k_; ++j) bmat[j * k_ + r] = column_entry(basis[r], j);
      if (!solve_linear(bmat, ones, k_, resolved))
        throw NumericError("staircase simplex: singular final basis");
      for (std::size_t r = 0; r < k_; ++r) {
        if (resolved[r] < -1e-9)
          throw NumericError("staircase simplex: infeasible resolved weights");
        weights[r] = std::max(resolved[r], 0.0);
      }
    }
    Solution out;
    out.iterations = it;
    out.basis_masks.reserve(k_);
    for (std::size_t r = 0; r < k_; ++r)
      out.basis_masks.push_back(static_cast<std::uint32_t>(basis[r]));
    out.weights = std::move(weights);
    return out;
  }

 private:
  std::size_t k_;
  std::size_t n_pat_;
  double em1_;
  double p_total_ = 0.0;
  double d_total_ = 0.0;
  double c_max_ = 0.0;
  std::vector<double> p_, d_;
  std::vector<double> subset_p_, subset_d_, subset_y_;
  std::vector<char> in_basis_;
};

Channel binomial2_case_matrix(double alpha, int which) {
  const double e = std::exp(alpha);
  Channel c;
  c.rows = c.cols = 3;
  c.alpha = alpha;
  c.input_labels = {0.0, 1.0, 2.0};
  c.output_labels = {0.0, 1.0, 2.0};
  if (which == 1) {
    c.matrix = {e, 1, 1, 1, e, e, 0, 0, 0};
    for (auto& v : c.matrix) v /= (e + 1.0);
  } else if (which == 2) {
    c.matrix = {e, 1, 1, 1, e, 1, 1, 1, e};
    for (auto& v : c.matrix) v /= (e + 2.0);
  } else {
    c.matrix = {e, e, 1, 1, 1, e, 0, 0, 0};
    for (auto& v : c.matrix) v /= (e + 1.0);
  }
  return c;
}

}  // namespace

OptimalMechanismResult solve_optimal_mechanism(const DiscreteModel& model, double theta,
                                               double alpha) {
  const std::size_t k = model.size();
  if (k < 2) throw std::invalid_argument("solve_optimal_mechanism: model needs >= 2 points");
  if (!(alpha > 0.0)) throw std::invalid_argument("solve_optimal_mechanism: alpha must be > 0");
  if (k > kMaxStaircaseInputs) {
    std::ostringstream os;
    os << "solve_optimal_mechanism: k=" << k << " exceeds the cap of " << kMaxStaircaseInputs
       << "; use a coarser discretization";
    throw ResourceLimitError(os.str());
  }
  const auto p = model.pmf(theta);
  const auto pd = model.pmf_dot(theta);

  StaircaseSimplex lp(k, alpha, p, pd);
  auto solution = lp.run();

  // Keep patterns with nonvanishing weight, presented in mask order.
  std::vector<std::pair<std::uint32_t, double>> kept;
  for (std::size_t r = 0; r < solution.basis_masks.size(); ++r)
    if (solution.weights[r] > 1e-14)
      kept.emplace_back(solution.basis_masks[r], solution.weights[r]);
  std::sort(kept.begin(), kept.end());
  if (kept.empty()) throw NumericError("solve_optimal_mechanism: empty optimal basis");

  const double ealpha = std::exp(alpha);
  OptimalMechanismResult result;
  result.lp_iterations = solution.iterations;
  Channel& ch = result.channel;
  ch.rows = kept.size();
  ch.cols = k;
  ch.alpha = alpha;
  ch.input_labels = model.labels();
  ch.matrix.assign(ch.rows * ch.cols, 0.0);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    result.active_patterns.push_back(kept[r].first);
    ch.output_labels.push_back(static_cast<double>(r));
    for (std::size_t j = 0; j < k; ++j) {
      const bool hi = kept[r].first & (1u << j);
      ch.at(r, j) = kept[r].second * (hi ? ealpha : 1.0);
    }
    result.i_star += kept[r].second * lp.objective(kept[r].first);
  }
  // Absorb the (sub-1e-12) column-sum residual into the largest entry of
  // each column so the returned matrix is exactly column-stochastic.
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    std::size_t argmax = 0;
    for (std::size_t r = 0; r < ch.rows; ++r) {
      sum += ch(r, j);
      if (ch(r, j) > ch(argmax, j)) argmax = r;
    }
    const double deficit = 1.0 - sum;
    if (std::fabs(deficit) > 1e-12)
      throw NumericError("solve_optimal_mechanism: residual column mass above tolerance");
    ch.at(argmax, j) += deficit;
  }
  return result;
}

double binomial2_threshold(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("binomial2_threshold: alpha must be > 0");
  const DiscreteModel model = binomial_model(2);
  const Channel two_row = binomial2_case_matrix(alpha, 1);
  const Channel three_row = binomial2_case_matrix(alpha, 2);
  auto margin = [&](double theta) {
    return fisher_info_private(two_row, model, theta) -
           fisher_info_private(three_row, model, theta);
  };
  double lo = 1e-9;
  double hi = 0.5 - 1e-9;
  if (margin(hi) >= 0.0) return 0.0;  // no crossing: two-row wins up to 1/2
  if (margin(lo) <= 0.0)
    throw NumericError("binomial2_threshold: candidate curves do not bracket a crossing");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (margin(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 - 0.5 * (lo + hi);
}

Channel binomial2_reference(double theta, double alpha) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::domain_error("binomial2_reference: theta outside (0,1)");
  const double c = binomial2_threshold(alpha);
  if (theta <= 0.5 - c) return binomial2_case_matrix(alpha, 1);
  if (theta < 0.5 + c) return binomial2_case_matrix(alpha, 2);
  return binomial2_case_matrix(alpha, 3);
}

std::vector<RegimeRow> regime_map(const DiscreteModel& model,
                                  std::span<const double> theta_grid, double alpha) {
  std::vector<RegimeRow> rows;
  rows.reserve(theta_grid.size());
  const Channel baseline = randomized_response(model.size(), alpha, model.labels());
  for (double theta : theta_grid) {
    auto opt = solve_optimal_mechanism(model, theta, alpha);
    RegimeRow row;
    row.theta = theta;
    row.i_star = opt.i_star;
    row.i_rr = fisher_info_private(baseline, model, theta);
    row.ratio = (opt.i_star > 0.0) ? row.i_rr / opt.i_star
                                   : std::numeric_limits<double>::quiet_NaN();
    row.active_patterns = std::move(opt.active_patterns);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ldpeff
