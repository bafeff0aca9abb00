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
#include "voxood/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxood/errors.hpp"

namespace voxood {

void RayMarchConfig::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("ray march: scale must be positive and finite");
  }
}

std::vector<RayStep> ray_march(const Vec3& camera_voxel, const Vec3i& target,
                               const RayMarchConfig& cfg) {
  cfg.validate();
  if (round_to_voxel(camera_voxel) == target) {
    throw Error("ray march: target voxel equals the camera voxel");
  }
  const Vec3 goal = target.cast<double>();
  const Vec3 offset = goal - camera_voxel;
  const double length = offset.norm();
  const Vec3 direction = offset / length;
  const double step = cfg.step();

  std::vector<RayStep> steps;
  steps.reserve(static_cast<std::size_t>(length / step) + 2);
  // The distance to the target shrinks by exactly one step length per sample,
  // so some sample always lands inside the terminal ball of radius step.
  const std::int64_t cap =
      static_cast<std::int64_t>(std::ceil(length / step)) + 2;
  for (std::int64_t k = 0; k <= cap; ++k) {
    const Vec3 position = camera_voxel + (k * step) * direction;
    if ((position - goal).norm() <= step) {
      steps.push_back({position, target});
      return steps;
    }
    steps.push_back({position, round_to_voxel(position)});
  }
  throw Error("ray march: failed to terminate");  // unreachable
}

LiftResult lift_mask_to_points(const AnomalyMask2D& mask,
                               const DepthMap& aligned,
                               const CameraModel& cam) {
  mask.validate();
  aligned.validate();
  cam.validate();
  if (aligned.kind != DepthKind::metric) {
    throw ConfigError("lift: depth map must be metric (run alignment first)");
  }
  if (mask.width != aligned.width || mask.height != aligned.height) {
    throw SizeMismatchError("lift: mask " + std::to_string(mask.width) + "x" +
                            std::to_string(mask.height) +
                            " does not match depth " +
                            std::to_string(aligned.width) + "x" +
                            std::to_string(aligned.height));
  }
  LiftResult result;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const float d = aligned.at(x, y);
      if (!DepthMap::valid_value(d)) {
        ++result.skipped_invalid_depth;
        continue;
      }
      result.points.points.push_back(back_project_pixel(
          cam, Eigen::Vector2d(x, y), static_cast<double>(d)));
    }
  }
  return result;
}

VoxelizeResult voxelize_points(const PointCloud& points, const GridMeta& meta) {
  meta.validate();
  VoxelizeResult result;
  std::vector<std::int64_t> flats;
  flats.reserve(points.points.size());
  for (const Vec3& p : points.points) {
    const auto idx = world_to_voxel(p, meta);
    if (idx.has_value()) {
      flats.push_back(meta.flat_index(*idx));
    } else {
      ++result.out_of_range;
    }
  }
  std::sort(flats.begin(), flats.end());
  flats.erase(std::unique(flats.begin(), flats.end()), flats.end());
  result.voxels.reserve(flats.size());
  for (const std::int64_t flat : flats) {
    result.voxels.push_back(meta.unflatten(flat));
  }
  return result;
}

namespace {

Visibility classify_visibility(const LabelGrid& scene, const Vec3& camera_voxel,
                               const Vec3i& camera_voxel_idx,
                               const Vec3i& target,
                               const RayMarchConfig& cfg) {
  if (camera_voxel_idx == target) return Visibility::visible;
  const std::vector<RayStep> steps = ray_march(camera_voxel, target, cfg);
  bool entered = false;
  // The last entry is the terminal sample; everything before it is an
  // intermediate subject to the occlusion test.
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    const Vec3i& v = steps[k].voxel;
    if (!scene.meta.contains(v)) {
      if (entered) return Visibility::occluded;  // left the grid mid-flight
      continue;  // still approaching the grid; outside space is transparent
    }
    entered = true;
    if (v == camera_voxel_idx || v == target) continue;
    if (scene.occupied(v)) return Visibility::occluded;
  }
  return Visibility::visible;
}

}  // namespace

IntegrationResult integrate_with_occlusion(
    const LabelGrid& scene, const std::vector<Vec3i>& anomaly_voxels,
    const CameraModel& cam, const IntegrateOptions& options) {
  scene.validate();
  cam.validate();
  options.ray.validate();
  if (!(options.camera_margin_voxels >= 0.0)) {
    throw ConfigError("integrate: camera margin must be non-negative");
  }

  const GridMeta& meta = scene.meta;
  const Vec3 camera_voxel = world_to_voxel_continuous(cam.center(), meta);
  for (int a = 0; a < 3; ++a) {
    const double lo = -0.5 - options.camera_margin_voxels;
    const double hi = meta.dims[a] - 0.5 + options.camera_margin_voxels;
    if (!(camera_voxel[a] >= lo && camera_voxel[a] <= hi)) {
      throw Error("integrate: camera lies farther than " +
                  std::to_string(options.camera_margin_voxels) +
                  " voxels outside the grid");
    }
  }
  const Vec3i camera_voxel_idx = round_to_voxel(camera_voxel);

  std::vector<std::int64_t> flats;
  flats.reserve(anomaly_voxels.size());
  for (const Vec3i& v : anomaly_voxels) {
    if (!meta.contains(v)) {
      throw Error("integrate: anomaly voxel out of range");
    }
    flats.push_back(meta.flat_index(v));
  }
  std::sort(flats.begin(), flats.end());
  flats.erase(std::unique(flats.begin(), flats.end()), flats.end());

  IntegrationResult result;
  result.visibility.reserve(flats.size());
  for (const std::int64_t flat : flats) {
    const Vec3i target = meta.unflatten(flat);
    const Visibility state = classify_visibility(scene, camera_voxel,
                                                 camera_voxel_idx, target,
                                                 options.ray);
    result.visibility.push_back({target, state});
    if (state == Visibility::visible) {
      ++result.visible_count;
    } else {
      ++result.occluded_count;
    }
  }

  result.grid = scene;
  for (const VisibilityRecord& record : result.visibility) {
    if (record.state == Visibility::visible || options.write_occluded) {
      result.grid.at(record.voxel) = scene.anomaly_class;
    }
  }
  return result;
}

}  // namespace voxood
