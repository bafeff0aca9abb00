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
#include "voxood/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "voxood/errors.hpp"

namespace voxood {

Vec3i GridMeta::unflatten(std::int64_t flat) const {
  const std::int64_t x = flat % dims.x();
  const std::int64_t rest = flat / dims.x();
  const std::int64_t y = rest % dims.y();
  const std::int64_t z = rest / dims.y();
  return Vec3i(static_cast<int>(x), static_cast<int>(y), static_cast<int>(z));
}

void GridMeta::validate() const {
  if (dims.x() < 1 || dims.y() < 1 || dims.z() < 1) {
    throw ConfigError("grid dims must be >= 1 per axis");
  }
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw ConfigError("voxel_size must be positive and finite");
  }
  if (!origin.allFinite()) {
    throw ConfigError("grid origin must be finite");
  }
}

std::optional<Vec3i> world_to_voxel(const Vec3& p, const GridMeta& meta) {
  if (!p.allFinite()) {
    throw std::invalid_argument("world_to_voxel: point must be finite");
  }
  const Vec3 rel = (p - meta.origin) / meta.voxel_size;
  const Vec3i idx(static_cast<int>(std::floor(rel.x())),
                  static_cast<int>(std::floor(rel.y())),
                  static_cast<int>(std::floor(rel.z())));
  if (!meta.contains(idx)) {
    return std::nullopt;
  }
  return idx;
}

Vec3 voxel_to_world(const Vec3i& idx, const GridMeta& meta) {
  if (!meta.contains(idx)) {
    throw std::out_of_range("voxel_to_world: index outside grid dims");
  }
  return meta.origin + (idx.cast<double>().array() + 0.5).matrix() * meta.voxel_size;
}

Vec3 world_to_voxel_continuous(const Vec3& p, const GridMeta& meta) {
  return (p - meta.origin) / meta.voxel_size - Vec3::Constant(0.5);
}

Vec3i round_to_voxel(const Vec3& q) {
  return Vec3i(static_cast<int>(std::round(q.x())),
               static_cast<int>(std::round(q.y())),
               static_cast<int>(std::round(q.z())));
}

LabelGrid LabelGrid::filled(const GridMeta& meta, std::uint16_t value,
                            std::uint16_t free_class,
                            std::uint16_t anomaly_class) {
  meta.validate();
  LabelGrid grid;
  grid.meta = meta;
  grid.labels.assign(static_cast<std::size_t>(meta.voxel_count()), value);
  grid.free_class = free_class;
  grid.anomaly_class = anomaly_class;
  return grid;
}

void LabelGrid::validate() const {
  meta.validate();
  if (static_cast<std::int64_t>(labels.size()) != meta.voxel_count()) {
    throw ConfigError("label grid has " + std::to_string(labels.size()) +
                      " labels, expected " + std::to_string(meta.voxel_count()));
  }
}

void LogitVolume::validate() const {
  meta.validate();
  if (num_classes < 2) {
    throw ConfigError("logit volume needs at least 2 classes");
  }
  const std::int64_t expected =
      static_cast<std::int64_t>(num_classes) * meta.voxel_count();
  if (static_cast<std::int64_t>(values.size()) != expected) {
    throw ConfigError("logit volume has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(expected));
  }
  for (const float v : values) {
    if (!std::isfinite(v)) {
      throw ConfigError("logit volume contains non-finite values");
    }
  }
}

void ScoreVolume::validate() const {
  meta.validate();
  if (static_cast<std::int64_t>(scores.size()) != meta.voxel_count()) {
    throw ConfigError("score volume has " + std::to_string(scores.size()) +
                      " scores, expected " + std::to_string(meta.voxel_count()));
  }
  for (const float s : scores) {
    if (!std::isfinite(s)) {
      throw ConfigError("score volume contains non-finite values");
    }
  }
}

BinaryVolume BinaryVolume::zeros(const GridMeta& meta) {
  meta.validate();
  BinaryVolume vol;
  vol.meta = meta;
  vol.values.assign(static_cast<std::size_t>(meta.voxel_count()), 0);
  return vol;
}

std::int64_t BinaryVolume::count() const {
  std::int64_t n = 0;
  for (const std::uint8_t v : values) {
    n += v != 0;
  }
  return n;
}

void BinaryVolume::validate() const {
  meta.validate();
  if (static_cast<std::int64_t>(values.size()) != meta.voxel_count()) {
    throw ConfigError("binary volume has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(meta.voxel_count()));
  }
}

}  // namespace voxood
