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
#include "voxood/camera.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "voxood/errors.hpp"

namespace voxood {

void CameraModel::validate() const {
  constexpr double kTol = 1e-6;
  const Eigen::Matrix3d rtr = rotation.transpose() * rotation;
  if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kTol) {
    throw ConfigError("camera rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > kTol) {
    throw ConfigError("camera rotation determinant must be +1");
  }
  if (std::abs(intrinsics(2, 2) - 1.0) > kTol) {
    throw ConfigError("intrinsics K(2,2) must equal 1");
  }
  if (!(intrinsics(0, 0) > 0.0) || !(intrinsics(1, 1) > 0.0)) {
    throw ConfigError("intrinsics focal entries must be positive");
  }
  if (!translation.allFinite() || !intrinsics.allFinite()) {
    throw ConfigError("camera parameters must be finite");
  }
}

std::optional<Projection> try_project_point(const CameraModel& cam,
                                            const Vec3& p) {
  const Vec3 x_cam = cam.rotation * p + cam.translation;
  if (!(x_cam.z() > 0.0)) {
    return std::nullopt;
  }
  const Vec3 homogeneous = cam.intrinsics * x_cam / x_cam.z();
  return Projection{Eigen::Vector2d(homogeneous.x(), homogeneous.y()),
                    x_cam.norm()};
}

Projection project_point(const CameraModel& cam, const Vec3& p) {
  auto proj = try_project_point(cam, p);
  if (!proj) {
    throw std::domain_error("project_point: point is behind the camera");
  }
  return *proj;
}

Vec3 back_project_pixel(const CameraModel& cam, const Eigen::Vector2d& pixel,
                        double distance) {
  if (!(distance > 0.0) || !std::isfinite(distance)) {
    throw std::invalid_argument("back_project_pixel: distance must be > 0");
  }
  const Vec3 homogeneous(pixel.x(), pixel.y(), 1.0);
  const Vec3 ray = cam.intrinsics.inverse() * homogeneous;
  const Vec3 x_cam = ray * (distance / ray.norm());
  return cam.rotation.transpose() * (x_cam - cam.translation);
}

}  // namespace voxood
