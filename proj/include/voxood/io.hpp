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
#include <optional>

#include "voxood/camera.hpp"
#include "voxood/depth.hpp"
#include "voxood/grid.hpp"
#include "voxood/point_cloud.hpp"
#include "voxood/scoring.hpp"

namespace voxood {

// All on-disk formats are little-endian regardless of host.
//
// Volumes share one 60-byte container header:
//   bytes  0..7   magic "OCCOODV1"
//   bytes  8..11  dtype: 1 = u16 labels, 2 = f32 scores, 3 = f32 logits,
//                        4 = u8 mask (uint32)
//   bytes 12..23  dims X, Y, Z (uint32 each)
//   bytes 24..27  class count K (uint32; 1 unless dtype = logits)
//   bytes 28..35  voxel_size (float64)
//   bytes 36..59  origin x, y, z (float64 each)
// followed by the payload in the x-major flattening (class-major for
// logits). Headerless label files of exactly X*Y*Z u16 words are accepted
// by read_label_grid when a fallback GridMeta is supplied, matching common
// voxel-benchmark releases.
//
// Depth rasters: magic "OCCOODD1", uint32 width, height, kind
// (0 = pseudo, 1 = metric), then width*height float32 row-major. read_depth_raster
// also accepts grayscale PFM ("Pf", bottom-up rows, negative scale =
// little-endian), which reads as kind = pseudo.
//
// Masks: binary PGM (P5, maxval <= 255); nonzero = anomaly.
//
// Calibration: whitespace-separated text, one "key: values" per line.
// "P2:" (or "P:") holds the 3x4 projection whose left 3x3 is K; "Tr:" an
// optional 3x4 or 4x4 extrinsic; "S:" an optional "width height".
// The projection's fourth column folds into the translation as inv(K) * p4.
//
// Point clouds: headerless N*3 float32 (x, y, z per point).

/// Readers refuse to allocate payloads larger than this (16 GiB).
inline constexpr std::uint64_t kMaxPayloadBytes = 16ULL << 30;

void write_label_grid(const LabelGrid& grid, const std::filesystem::path& path);
LabelGrid read_label_grid(const std::filesystem::path& path,
                          const std::optional<GridMeta>& fallback_meta = {});

void write_logit_volume(const LogitVolume& volume,
                        const std::filesystem::path& path);
LogitVolume read_logit_volume(const std::filesystem::path& path);

void write_score_volume(const ScoreVolume& volume,
                        const std::filesystem::path& path);
ScoreVolume read_score_volume(const std::filesystem::path& path);

void write_binary_volume(const BinaryVolume& volume,
                         const std::filesystem::path& path);
BinaryVolume read_binary_volume(const std::filesystem::path& path);

void write_depth_raster(const DepthMap& depth,
                        const std::filesystem::path& path);
DepthMap read_depth_raster(const std::filesystem::path& path);

void write_mask(const AnomalyMask2D& mask, const std::filesystem::path& path);
AnomalyMask2D read_mask(const std::filesystem::path& path);

CameraModel read_calib(const std::filesystem::path& path);
void write_calib(const CameraModel& cam, const std::filesystem::path& path);

PointCloud read_point_cloud(const std::filesystem::path& path);
void write_point_cloud(const PointCloud& cloud,
                       const std::filesystem::path& path);

/// JSON object with "region_weight" and a "classes" map from class ID to
/// "instance" | "region" | "free".
ClassPartition read_partition(const std::filesystem::path& path);
void write_partition(const ClassPartition& partition,
                     const std::filesystem::path& path);

/// JSON object with "means" (class ID -> K-vector) and "counts".
ClassMeanLogits read_class_means(const std::filesystem::path& path);
void write_class_means(const ClassMeanLogits& means,
                       const std::filesystem::path& path);

}  // namespace voxood
