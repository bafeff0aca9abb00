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
#include "fixtures.hpp"

namespace voxood::testing {

GridMeta small_meta(int nx, int ny, int nz, double voxel_size) {
  GridMeta meta;
  meta.dims = Vec3i(nx, ny, nz);
  meta.voxel_size = voxel_size;
  meta.origin = Vec3::Zero();
  return meta;
}

CameraModel make_forward_camera(const Vec3& center) {
  CameraModel cam;
  cam.intrinsics << 320.0, 0.0, 320.0, 0.0, 320.0, 240.0, 0.0, 0.0, 1.0;
  cam.rotation << 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0;
  cam.translation = -cam.rotation * center;
  cam.image_size = Eigen::Vector2i(640, 480);
  return cam;
}

LabelGrid make_wall_scene(const GridMeta& meta, int wall_i, int wall_j_lo,
                          int wall_j_hi, int wall_k_hi) {
  LabelGrid grid = LabelGrid::filled(meta, 0);
  for (int j = 0; j < meta.dims.y(); ++j) {
    for (int i = 0; i < meta.dims.x(); ++i) {
      grid.at(Vec3i(i, j, 0)) = 9;
    }
  }
  for (int k = 0; k <= wall_k_hi; ++k) {
    for (int j = wall_j_lo; j <= wall_j_hi; ++j) {
      grid.at(Vec3i(wall_i, j, k)) = 13;
    }
  }
  return grid;
}

ScoreVolume random_scores(const GridMeta& meta, std::uint64_t seed,
                          int levels) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ScoreVolume out;
  out.meta = meta;
  out.scores.resize(static_cast<std::size_t>(meta.voxel_count()));
  for (float& s : out.scores) {
    double v = uniform(rng);
    if (levels > 0) {
      v = static_cast<double>(static_cast<int>(v * levels)) / levels;
    }
    s = static_cast<float>(v);
  }
  return out;
}

BinaryVolume random_binary(const GridMeta& meta, std::uint64_t seed,
                           double density, bool force_one) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  BinaryVolume out = BinaryVolume::zeros(meta);
  for (std::uint8_t& v : out.values) {
    v = uniform(rng) < density ? 1 : 0;
  }
  if (force_one) {
    out.values[static_cast<std::size_t>(meta.voxel_count()) / 2] = 1;
  }
  return out;
}

LogitVolume random_logits(const GridMeta& meta, std::uint32_t num_classes,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-4.0, 4.0);
  LogitVolume out;
  out.meta = meta;
  out.num_classes = num_classes;
  out.values.resize(static_cast<std::size_t>(meta.voxel_count()) *
                    num_classes);
  for (float& v : out.values) v = static_cast<float>(uniform(rng));
  return out;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::current_path() / "voxood_test_tmp" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace voxood::testing
