/* Copyright 2026 The Voxood Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "voxood/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "voxood/errors.hpp"

namespace voxood {
namespace {

constexpr double kCoeffZeroTol = 1e-12;

// Full Gram caching is worthwhile up to this many samples (32 MiB of doubles);
// past it, the two rows touched per iteration are recomputed on demand.
constexpr std::size_t kFullKernelLimit = 2048;

double rbf(double a, double b, double gamma) {
  const double d = a - b;
  return std::exp(-gamma * d * d);
}

struct Solver {
  const std::vector<double>& x;
  const std::vector<double>& y;
  double gamma;
  double c_reg;
  double epsilon;

  std::size_t n;
  std::vector<double> beta;  // alpha - alpha*, box [-C, C], sums to zero
  std::vector<double> f;     // f_k = sum_j beta_j K(x_k, x_j)
  std::vector<double> gram;  // full kernel matrix when n <= kFullKernelLimit
  std::vector<double> row_a, row_b;

  Solver(const std::vector<double>& xs, const std::vector<double>& ys,
         double g, double c, double eps)
      : x(xs), y(ys), gamma(g), c_reg(c), epsilon(eps), n(xs.size()),
        beta(n, 0.0), f(n, 0.0) {
    if (n <= kFullKernelLimit) {
      gram.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        gram[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
          const double k = rbf(x[i], x[j], gamma);
          gram[i * n + j] = k;
          gram[j * n + i] = k;
        }
      }
    } else {
      row_a.resize(n);
      row_b.resize(n);
    }
  }

  const double* kernel_row(std::size_t k, std::vector<double>& scratch) {
    if (!gram.empty()) return gram.data() + k * n;
    for (std::size_t j = 0; j < n; ++j) scratch[j] = rbf(x[k], x[j], gamma);
    return scratch.data();
  }

  // Right derivative of the dual objective along +e_k / -e_k. The L1 tube
  // penalty makes the two one-sided slopes differ at beta_k == 0.
  double grad_up(std::size_t k) const {
    return y[k] - f[k] - (beta[k] >= 0.0 ? epsilon : -epsilon);
  }
  double grad_down(std::size_t k) const {
    return y[k] - f[k] - (beta[k] > 0.0 ? epsilon : -epsilon);
  }

  // Objective change for beta_i += delta, beta_j -= delta.
  double delta_objective(std::size_t i, std::size_t j, double eta,
                         double delta) const {
    const double gi = y[i] - f[i];
    const double gj = y[j] - f[j];
    return -0.5 * eta * delta * delta + delta * (gi - gj) -
           epsilon * (std::abs(beta[i] + delta) - std::abs(beta[i])) -
           epsilon * (std::abs(beta[j] - delta) - std::abs(beta[j]));
  }

  // Exact maximizer of the piecewise-quadratic objective restriction by
  // candidate evaluation: box end, L1 kinks, and the stationary point of
  // every sign regime that contains it.
  double line_search(std::size_t i, std::size_t j, double eta,
                     double delta_max) const {
    double candidates[8];
    int count = 0;
    candidates[count++] = delta_max;
    const double kink_i = -beta[i];
    const double kink_j = beta[j];
    if (kink_i > 0.0 && kink_i < delta_max) candidates[count++] = kink_i;
    if (kink_j > 0.0 && kink_j < delta_max) candidates[count++] = kink_j;
    if (eta > 0.0) {
      const double gi = y[i] - f[i];
      const double gj = y[j] - f[j];
      for (const double si : {-1.0, 1.0}) {
        for (const double sj : {-1.0, 1.0}) {
          const double d = (gi - gj - epsilon * (si - sj)) / eta;
          if (!(d > 0.0 && d < delta_max)) continue;
          const double bi = beta[i] + d;
          const double bj = beta[j] - d;
          if (bi * si < 0.0 || bj * sj < 0.0) continue;  // wrong regime
          candidates[count++] = d;
        }
      }
    }
    double best = 0.0;
    double best_gain = 0.0;
    for (int c = 0; c < count; ++c) {
      const double gain = delta_objective(i, j, eta, candidates[c]);
      if (gain > best_gain) {
        best_gain = gain;
        best = candidates[c];
      }
    }
    return best;
  }

  double objective() const {
    double w = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      w += beta[k] * (y[k] - 0.5 * f[k]) - epsilon * std::abs(beta[k]);
    }
    return w;
  }
};

}  // namespace

double SvrModel::predict(double pseudo) const {
  double acc = bias;
  for (std::size_t k = 0; k < support_inputs.size(); ++k) {
    acc += dual_coeffs[k] * rbf(support_inputs[k], pseudo, gamma);
  }
  return acc;
}

void SvrModel::validate() const {
  if (support_inputs.size() != dual_coeffs.size()) {
    throw ConfigError("svr model: support/coefficient length mismatch");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("svr model: gamma must be positive and finite");
  }
  if (!(c_reg > 0.0) || epsilon < 0.0 || !std::isfinite(bias)) {
    throw ConfigError("svr model: invalid hyperparameters");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < dual_coeffs.size(); ++k) {
    const double c = dual_coeffs[k];
    if (!std::isfinite(c) || !std::isfinite(support_inputs[k])) {
      throw ConfigError("svr model: non-finite entries");
    }
    if (std::abs(c) > c_reg * (1.0 + 1e-9)) {
      throw ConfigError("svr model: dual coefficient exceeds box constraint");
    }
    sum += c;
  }
  if (std::abs(sum) > 1e-6) {
    throw ConfigError("svr model: dual coefficients must sum to zero");
  }
}

SvrModel fit_depth_alignment(const std::vector<DepthPair>& pairs,
                             const SvrHyper& hyper, SvrFitReport* report) {
  const std::size_t n = pairs.size();
  if (n < 2) {
    throw ConfigError("svr fit: need at least two depth pairs");
  }
  if (!(hyper.c_reg > 0.0) || !std::isfinite(hyper.c_reg)) {
    throw ConfigError("svr fit: c_reg must be positive");
  }
  if (hyper.epsilon < 0.0 || !std::isfinite(hyper.epsilon)) {
    throw ConfigError("svr fit: epsilon must be non-negative");
  }
  if (!(hyper.tolerance > 0.0)) {
    throw ConfigError("svr fit: tolerance must be positive");
  }
  if (hyper.max_iterations < 0) {
    throw ConfigError("svr fit: max_iterations must be non-negative");
  }

  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = pairs[k].pseudo;
    ys[k] = pairs[k].metric;
    if (!std::isfinite(xs[k]) || !std::isfinite(ys[k])) {
      throw ConfigError("svr fit: non-finite depth pair");
    }
  }
  const double mean =
      std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (const double v : xs) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) {
    throw ConfigError("svr fit: pseudo depths must take at least two values");
  }
  double gamma = hyper.gamma;
  if (!(gamma > 0.0)) gamma = 1.0 / (2.0 * var);
  if (!std::isfinite(gamma)) {
    throw ConfigError("svr fit: invalid gamma");
  }

  const double c_reg = hyper.c_reg;
  const double epsilon = hyper.epsilon;
  const std::int64_t max_iter =
      hyper.max_iterations > 0
          ? hyper.max_iterations
          : std::max<std::int64_t>(100000, 500 * static_cast<std::int64_t>(n));

  Solver s(xs, ys, gamma, c_reg, epsilon);
  std::int64_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (iter < max_iter) {
    // Maximal violating pair: best ascent coordinate against best descent
    // coordinate, honoring the shared box.
    std::size_t up = n, dn = n, up2 = n, dn2 = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (s.beta[k] < c_reg) {
        if (up == n || s.grad_up(k) > s.grad_up(up)) {
          up2 = up;
          up = k;
        } else if (up2 == n || s.grad_up(k) > s.grad_up(up2)) {
          up2 = k;
        }
      }
      if (s.beta[k] > -c_reg) {
        if (dn == n || s.grad_down(k) < s.grad_down(dn)) {
          dn2 = dn;
          dn = k;
        } else if (dn2 == n || s.grad_down(k) < s.grad_down(dn2)) {
          dn2 = k;
        }
      }
    }
    if (up == n || dn == n) {
      gap = 0.0;
      converged = true;
      break;
    }
    if (up == dn) {
      // A coordinate cannot trade mass with itself; fall back to the better
      // of the two runner-up pairings.
      const double alt_up =
          up2 == n ? -std::numeric_limits<double>::infinity()
                   : s.grad_up(up2) - s.grad_down(dn);
      const double alt_dn =
          dn2 == n ? -std::numeric_limits<double>::infinity()
                   : s.grad_up(up) - s.grad_down(dn2);
      if (alt_up >= alt_dn) {
        up = up2;
      } else {
        dn = dn2;
      }
      if (up == n || dn == n) {
        gap = 0.0;
        converged = true;
        break;
      }
    }
    gap = s.grad_up(up) - s.grad_down(dn);
    if (gap <= hyper.tolerance) {
      converged = true;
      break;
    }

    const double* row_i = s.kernel_row(up, s.row_a);
    const double* row_j = s.kernel_row(dn, s.row_b);
    const double eta = row_i[up] + row_j[dn] - 2.0 * row_i[dn];
    const double delta_max =
        std::min(c_reg - s.beta[up], s.beta[dn] + c_reg);
    const double delta = s.line_search(up, dn, std::max(eta, 0.0), delta_max);
    if (!(delta > 0.0)) break;  // stalled at numerical precision

    s.beta[up] += delta;
    s.beta[dn] -= delta;
    s.beta[up] = std::clamp(s.beta[up], -c_reg, c_reg);
    s.beta[dn] = std::clamp(s.beta[dn], -c_reg, c_reg);
    for (std::size_t k = 0; k < s.n; ++k) {
      s.f[k] += delta * (row_i[k] - row_j[k]);
    }
    ++iter;
  }
  if (!converged && iter >= max_iter) {
    throw ConvergenceError(
        "svr fit: iteration cap reached before the KKT gap closed", gap);
  }

  // Bias: average the exact value over free support vectors when any exist,
  // otherwise take the midpoint of the interval the KKT conditions leave.
  const double edge = c_reg * 1e-10;
  double free_sum = 0.0;
  int free_count = 0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double b = s.beta[k];
    const double r = ys[k] - s.f[k];
    if (b >= c_reg - edge) {
      hi = std::min(hi, r - epsilon);
    } else if (b <= -c_reg + edge) {
      lo = std::max(lo, r + epsilon);
    } else if (std::abs(b) <= kCoeffZeroTol) {
      lo = std::max(lo, r - epsilon);
      hi = std::min(hi, r + epsilon);
    } else {
      free_sum += r - (b > 0.0 ? epsilon : -epsilon);
      ++free_count;
    }
  }
  double bias = 0.0;
  if (free_count > 0) {
    bias = free_sum / free_count;
  } else if (std::isfinite(lo) && std::isfinite(hi)) {
    bias = 0.5 * (lo + hi);
  } else if (std::isfinite(lo)) {
    bias = lo;
  } else if (std::isfinite(hi)) {
    bias = hi;
  }

  SvrModel model;
  model.gamma = gamma;
  model.epsilon = epsilon;
  model.c_reg = c_reg;
  model.bias = bias;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(s.beta[k]) > kCoeffZeroTol) {
      model.support_inputs.push_back(xs[k]);
      model.dual_coeffs.push_back(s.beta[k]);
    }
  }

  if (report != nullptr) {
    report->iterations = iter;
    report->kkt_gap = gap;
    report->dual_objective = s.objective();
    report->support_count = static_cast<int>(model.dual_coeffs.size());
    double max_abs = 0.0;
    double sum_abs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double res = std::abs(model.predict(xs[k]) - ys[k]);
      max_abs = std::max(max_abs, res);
      sum_abs += res;
    }
    report->max_abs_residual = max_abs;
    report->mean_abs_residual = sum_abs / static_cast<double>(n);
  }
  return model;
}

DepthMap apply_depth_alignment(const SvrModel& model, const DepthMap& depth) {
  model.validate();
  depth.validate();
  DepthMap out = depth;
  out.kind = DepthKind::metric;
  for (float& v : out.values) {
    if (DepthMap::valid_value(v)) {
      v = static_cast<float>(model.predict(static_cast<double>(v)));
    }
  }
  return out;
}

}  // namespace voxood
