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

#include <optional>

#include <Eigen/Core>

#include "voxood/grid.hpp"

namespace voxood {

/// Pinhole camera: x_cam = R * p_world + t, pixel = (K * x_cam) / x_cam.z.
struct CameraModel {
  Eigen::Matrix3d intrinsics{Eigen::Matrix3d::Identity()};  // K, pixels
  Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};    // R, world -> cam
  Vec3 translation{Vec3::Zero()};                           // t, meters
  Eigen::Vector2i image_size{0, 0};  // (width, height); (0,0) when unknown

  /// Camera center in world coordinates: -R^T * t.
  Vec3 center() const { return -rotation.transpose() * translation; }

  /// Throws ConfigError unless R is orthonormal with det +1 (tolerance 1e-6),
  /// K(2,2) == 1 and both focal entries are positive.
  void validate() const;
};

/// Result of projecting a world point: pixel coordinates and the Euclidean
/// distance ||R p + t|| from the camera center (not the planar z-depth).
struct Projection {
  Eigen::Vector2d pixel;
  double distance;
};

/// Projects a world point; nullopt when the camera-frame depth is <= 0.
std::optional<Projection> try_project_point(const CameraModel& cam,
                                            const Vec3& p);

/// As try_project_point but throws std::domain_error for behind-camera points.
Projection project_point(const CameraModel& cam, const Vec3& p);

/// Inverts the projection: the world point on the ray through `pixel` whose
/// Euclidean camera distance equals `distance`.
Vec3 back_project_pixel(const CameraModel& cam, const Eigen::Vector2d& pixel,
                        double distance);

}  // namespace voxood
