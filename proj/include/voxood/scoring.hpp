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
#include <map>
#include <vector>

#include <Eigen/Core>

#include "voxood/grid.hpp"

namespace voxood {

/// Two-way semantic split driving the scoring rule: compact objects (cars,
/// people, poles, ...) score by directional deviation from the class mean,
/// homogeneous surfaces (road, vegetation, ...) by prediction entropy.
enum class ClassGroup { instance, region, free_space };

struct ClassPartition {
  std::map<std::uint16_t, ClassGroup> mapping;
  /// Multiplier on region-class scores so instance classes dominate.
  double region_weight = 0.5;

  /// Throws ConfigError unless exactly one class is free_space and
  /// region_weight lies in (0, 1].
  void validate() const;

  ClassGroup group_of(std::uint16_t cls) const;  // throws ConfigError if absent
  std::uint16_t free_class() const;              // throws ConfigError if absent

  /// Class IDs in [0, num_classes) with no group assignment.
  std::vector<std::uint16_t> missing_classes(std::uint32_t num_classes) const;
};

/// Per-class mean logit vectors with their support counts; classes with zero
/// support are absent.
struct ClassMeanLogits {
  std::map<std::uint16_t, Eigen::VectorXd> means;
  std::map<std::uint16_t, std::int64_t> counts;

  bool has(std::uint16_t cls) const { return means.count(cls) != 0; }
};

// --- Per-vector score primitives ---

/// Max-subtracted softmax; output sums to 1 within 1e-9.
Eigen::VectorXd softmax_probs(const Eigen::VectorXd& logits);

/// Shannon entropy -sum p ln p with 0 ln 0 := 0; range [0, ln K].
double entropy_score(const Eigen::VectorXd& probs);

/// 1 - cos(logit, mean), range [0, 2]. A zero-norm argument makes the angle
/// undefined; the score is then 0 and *degenerate (when given) is bumped.
double cosine_score(const Eigen::VectorXd& logit, const Eigen::VectorXd& mean,
                    std::int64_t* degenerate = nullptr);

/// Free energy -ln sum exp(l_k), computed with max subtraction.
double energy_score(const Eigen::VectorXd& logits);

/// 1 - max_k l_k.
double posterior_score(const Eigen::VectorXd& logits);

// --- Volume-level operations ---

struct GeometryPrior {
  LabelGrid pred_labels;  // per-voxel argmax class, ties to the lowest ID
  BinaryVolume occupied;  // argmax != free_class
};

GeometryPrior geometry_prior(const LogitVolume& volume,
                             std::uint16_t free_class);

/// Frame-local mean logit vector per predicted class over occupied voxels.
ClassMeanLogits class_mean_logits(const LogitVolume& volume,
                                  const LabelGrid& pred_labels,
                                  const BinaryVolume& occupied);

struct ScoringOptions {
  /// When set (the default), only voxels whose argmax is non-free are scored
  /// and normalized; free voxels are pinned to 0. When unset every voxel is
  /// scored, with free-predicted voxels treated like region classes.
  bool use_geometry_prior = true;
  /// Class means from a calibration set instead of the current frame.
  const ClassMeanLogits* external_means = nullptr;
};

struct ScoringDiagnostics {
  std::int64_t occupied_count = 0;
  std::int64_t zero_norm_cosine = 0;
  /// Voxels whose predicted class had no mean vector (possible only with
  /// external means); scored by plain entropy instead.
  std::int64_t missing_mean_fallbacks = 0;
  bool empty_occupancy = false;
  bool degenerate_range = false;  // raw min == raw max, all scores mapped to 0
};

/// Full semantic-aware scoring pipeline: geometry prior, class means, cosine
/// or weighted-entropy raw scores, then global min-max normalization to
/// [0, 1]. Throws ConfigError when the partition does not cover every class
/// of the volume.
ScoreVolume semantic_aware_score(const LogitVolume& volume,
                                 const ClassPartition& partition,
                                 const ScoringOptions& options = {},
                                 ScoringDiagnostics* diagnostics = nullptr);

enum class BaselineMethod { entropy, energy, posterior };

/// Uniform baseline scores (entropy / energy / posterior) with the same
/// geometry-prior gating and min-max normalization as semantic_aware_score.
ScoreVolume baseline_score_volume(const LogitVolume& volume,
                                  BaselineMethod method,
                                  bool use_geometry_prior,
                                  std::uint16_t free_class = 0,
                                  ScoringDiagnostics* diagnostics = nullptr);

}  // namespace voxood
