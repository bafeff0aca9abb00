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

#include "voxood/camera.hpp"
#include "voxood/depth.hpp"
#include "voxood/grid.hpp"
#include "voxood/point_cloud.hpp"

namespace voxood {

/// Ray-march resolution. The step length in voxel units is 1/scale, so larger
/// scales sample the ray more densely.
struct RayMarchConfig {
  double scale = 2.0;

  double step() const { return 1.0 / scale; }

  /// Throws ConfigError unless scale is positive and finite.
  void validate() const;
};

struct RayStep {
  Vec3 position;  // continuous voxel-frame coordinate
  Vec3i voxel;
};

/// Marches from the continuous camera coordinate toward the center of the
/// target voxel in steps of 1/scale voxel units, stopping at the first sample
/// within one step of the target. Intermediate voxels are the componentwise
/// half-away-from-zero rounding of the sample position; the terminal entry
/// carries the target voxel itself. Throws Error when the target voxel equals
/// the rounded camera position (zero-length ray).
std::vector<RayStep> ray_march(const Vec3& camera_voxel, const Vec3i& target,
                               const RayMarchConfig& cfg);

struct LiftResult {
  PointCloud points;
  std::int64_t skipped_invalid_depth = 0;
};

/// Back-projects every masked pixel with a valid metric depth into a world
/// point whose Euclidean camera distance equals the depth value. Masked
/// pixels with invalid depth are skipped and tallied. Throws ConfigError when
/// the depth map is not metric and SizeMismatchError when dimensions differ.
LiftResult lift_mask_to_points(const AnomalyMask2D& mask,
                               const DepthMap& aligned,
                               const CameraModel& cam);

struct VoxelizeResult {
  std::vector<Vec3i> voxels;  // deduplicated, sorted by flat index
  std::int64_t out_of_range = 0;
};

VoxelizeResult voxelize_points(const PointCloud& points, const GridMeta& meta);

enum class Visibility { visible, occluded };

struct VisibilityRecord {
  Vec3i voxel;
  Visibility state;
};

struct IntegrateOptions {
  RayMarchConfig ray;
  /// The camera center, in voxel units, may lie at most this far outside the
  /// grid per axis before integration refuses to run.
  double camera_margin_voxels = 64.0;
  /// When set, occluded anomaly voxels are written to the label grid as well,
  /// for datasets that keep occluded anomalies in the ground truth.
  bool write_occluded = false;
};

struct IntegrationResult {
  LabelGrid grid;
  std::vector<VisibilityRecord> visibility;  // sorted by flat voxel index
  std::int64_t visible_count = 0;
  std::int64_t occluded_count = 0;
};

/// Marches a ray from the camera to every anomaly voxel. A voxel is occluded
/// when a scene-occupied voxel (other than the camera's own voxel and the
/// target) is crossed strictly before the terminal step, or when the ray
/// leaves the grid after having entered it. Visible voxels, plus occluded
/// ones when write_occluded is set, are written with scene.anomaly_class; all
/// other labels are untouched. Decisions use only the input scene, so results
/// do not depend on the order of anomaly voxels.
IntegrationResult integrate_with_occlusion(const LabelGrid& scene,
                                           const std::vector<Vec3i>& anomaly_voxels,
                                           const CameraModel& cam,
                                           const IntegrateOptions& options = {});

}  // namespace voxood
