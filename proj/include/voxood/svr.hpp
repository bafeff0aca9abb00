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
#pragma once

#include <cstdint>
#include <vector>

#include "voxood/depth.hpp"

namespace voxood {

/// One training pair for depth alignment: estimator output vs. the metric
/// distance of the point that projected onto the same pixel.
struct DepthPair {
  double pseudo;
  double metric;
};

struct SvrHyper {
  double c_reg = 10.0;    // box constraint C
  double epsilon = 0.1;   // insensitive-tube half-width, meters
  double gamma = 0.0;     // RBF bandwidth; <= 0 selects 1 / (2 * var(pseudo))
  double tolerance = 1e-5;        // KKT gap at convergence
  std::int64_t max_iterations = 0;  // 0 selects max(100000, 500 * n)
};

/// Fitted 1D RBF support vector regressor mapping pseudo-depth to meters.
/// Only support vectors (nonzero dual coefficient) are retained, so the
/// coefficient sum stays at the solver's equality constraint value of zero.
struct SvrModel {
  std::vector<double> support_inputs;
  std::vector<double> dual_coeffs;  // alpha - alpha*
  double bias = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double c_reg = 0.0;

  double predict(double pseudo) const;

  /// Throws ConfigError if |coeff| exceeds c_reg, the coefficient sum
  /// exceeds 1e-6, or the arrays disagree in length.
  void validate() const;
};

struct SvrFitReport {
  std::int64_t iterations = 0;
  double kkt_gap = 0.0;        // final maximal-violating-pair gap
  double dual_objective = 0.0;
  int support_count = 0;
  double max_abs_residual = 0.0;
  double mean_abs_residual = 0.0;
};

/// Fits the epsilon-insensitive SVR dual by exact two-coordinate ascent on
/// maximal violating pairs. Requires >= 2 pairs with distinct pseudo values;
/// throws ConfigError on degenerate input and ConvergenceError (carrying the
/// final KKT gap) when the iteration cap is hit.
SvrModel fit_depth_alignment(const std::vector<DepthPair>& pairs,
                             const SvrHyper& hyper = {},
                             SvrFitReport* report = nullptr);

/// Maps every valid pixel of a pseudo-depth raster through the fitted model.
/// Invalid pixels pass through unchanged; the result is marked metric.
DepthMap apply_depth_alignment(const SvrModel& model, const DepthMap& depth);

}  // namespace voxood
