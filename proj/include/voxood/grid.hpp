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
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace voxood {

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;

/// Geometry of a dense voxel grid: voxel counts per axis, edge length in
/// meters, and the world position of the minimum corner of voxel (0,0,0).
///
/// Defaults match the common automotive occupancy layout: 256x256x32 voxels
/// of 0.2 m covering 51.2 m forward, +-25.6 m lateral and 6.4 m vertical.
struct GridMeta {
  Vec3i dims{256, 256, 32};
  double voxel_size{0.2};
  Vec3 origin{0.0, -25.6, -2.0};

  std::int64_t voxel_count() const {
    return static_cast<std::int64_t>(dims.x()) * dims.y() * dims.z();
  }

  /// Flattened storage order is x-major: flat = i + X * (j + Y * k).
  std::int64_t flat_index(const Vec3i& idx) const {
    return idx.x() +
           static_cast<std::int64_t>(dims.x()) *
               (idx.y() + static_cast<std::int64_t>(dims.y()) * idx.z());
  }

  Vec3i unflatten(std::int64_t flat) const;

  bool contains(const Vec3i& idx) const {
    return idx.x() >= 0 && idx.x() < dims.x() && idx.y() >= 0 &&
           idx.y() < dims.y() && idx.z() >= 0 && idx.z() < dims.z();
  }

  bool operator==(const GridMeta& other) const {
    return dims == other.dims && voxel_size == other.voxel_size &&
           origin == other.origin;
  }

  /// Throws ConfigError unless dims >= 1 per axis and voxel_size > 0.
  void validate() const;
};

/// Voxel index of a world point, or nullopt when the point falls outside the
/// grid extent. Intervals are half-open: a point exactly on the maximum
/// extent is out of range.
std::optional<Vec3i> world_to_voxel(const Vec3& p, const GridMeta& meta);

/// World position of a voxel center: origin + (idx + 0.5) * voxel_size.
/// Throws std::out_of_range for indices outside dims.
Vec3 voxel_to_world(const Vec3i& idx, const GridMeta& meta);

/// Continuous voxel-frame coordinate of a world point, with voxel centers on
/// the integer lattice: q = (p - origin) / voxel_size - 0.5. Rounding q
/// componentwise recovers the voxel index.
Vec3 world_to_voxel_continuous(const Vec3& p, const GridMeta& meta);

/// Componentwise round, halves away from zero (std::round semantics), fixed
/// so voxel sequences are platform-independent.
Vec3i round_to_voxel(const Vec3& q);

/// Dense grid of semantic class labels. free_class marks empty space and
/// anomaly_class is the reserved ID written by anomaly injection.
struct LabelGrid {
  GridMeta meta;
  std::vector<std::uint16_t> labels;
  std::uint16_t free_class{0};
  std::uint16_t anomaly_class{20};

  static LabelGrid filled(const GridMeta& meta, std::uint16_t value,
                          std::uint16_t free_class = 0,
                          std::uint16_t anomaly_class = 20);

  std::uint16_t at(const Vec3i& idx) const {
    return labels[meta.flat_index(idx)];
  }
  std::uint16_t& at(const Vec3i& idx) { return labels[meta.flat_index(idx)]; }

  bool occupied(const Vec3i& idx) const { return at(idx) != free_class; }

  /// Throws ConfigError when the label array length does not equal X*Y*Z.
  void validate() const;
};

/// Per-voxel, per-class raw classifier scores. Storage is class-major:
/// values[c * voxel_count + flat].
struct LogitVolume {
  GridMeta meta;
  std::uint32_t num_classes{0};
  std::vector<float> values;

  float at(std::int64_t flat, std::uint32_t cls) const {
    return values[static_cast<std::int64_t>(cls) * meta.voxel_count() + flat];
  }

  /// Throws ConfigError on length mismatch, num_classes < 2, or any
  /// non-finite value.
  void validate() const;
};

/// Per-voxel scalar anomaly score; in [0,1] after normalization.
struct ScoreVolume {
  GridMeta meta;
  std::vector<float> scores;

  void validate() const;
};

/// Dense binary volume (nonzero = set). Used for occupancy masks, ground
/// truth anomaly labels, dilated label regions and evaluation masks.
struct BinaryVolume {
  GridMeta meta;
  std::vector<std::uint8_t> values;

  static BinaryVolume zeros(const GridMeta& meta);

  bool test(std::int64_t flat) const { return values[flat] != 0; }
  bool test(const Vec3i& idx) const { return test(meta.flat_index(idx)); }
  void set(const Vec3i& idx, bool v = true) {
    values[meta.flat_index(idx)] = v ? 1 : 0;
  }

  std::int64_t count() const;

  void validate() const;
};

using EvalMask = BinaryVolume;

}  // namespace voxood
