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
#include <filesystem>
#include <random>
#include <string>

#include "voxood/camera.hpp"
#include "voxood/grid.hpp"

namespace voxood::testing {

/// Small grid with origin at the world origin so coordinates are easy to
/// reason about by hand.
GridMeta small_meta(int nx, int ny, int nz, double voxel_size = 0.2);

/// Forward-looking camera with driving-dataset axes (camera z = world x,
/// camera x = -world y, camera y = -world z), positioned at `center`.
/// Focal length 320 px, principal point at the center of a 640x480 image.
CameraModel make_forward_camera(const Vec3& center);

/// Ground slab plus a vertical wall; used by the occlusion tests.
///
/// Ground: k = 0 everywhere, class 9. Wall: i = wall_i, j in
/// [wall_j_lo, wall_j_hi], k in [0, wall_k_hi], class 13.
LabelGrid make_wall_scene(const GridMeta& meta, int wall_i, int wall_j_lo,
                          int wall_j_hi, int wall_k_hi);

/// Uniform random scores in [0, 1); optionally quantized to `levels` distinct
/// values so threshold sweeps exercise heavy ties.
ScoreVolume random_scores(const GridMeta& meta, std::uint64_t seed,
                          int levels = 0);

/// Bernoulli(density) volume; when force_one is set, one deterministic voxel
/// is always set so positive-dependent metrics stay defined.
BinaryVolume random_binary(const GridMeta& meta, std::uint64_t seed,
                           double density, bool force_one = false);

/// Random logits, uniform in [-4, 4].
LogitVolume random_logits(const GridMeta& meta, std::uint32_t num_classes,
                          std::uint64_t seed);

/// Fresh per-test scratch directory under the current working directory;
/// wiped if it already exists.
std::filesystem::path fresh_dir(const std::string& name);

}  // namespace voxood::testing
