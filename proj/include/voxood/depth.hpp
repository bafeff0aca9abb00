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

#include <cmath>
#include <cstdint>
#include <vector>

namespace voxood {

/// Whether depth values are relative estimator output (pseudo) or meters.
enum class DepthKind { pseudo, metric };

/// Row-major single-channel depth raster. Any non-finite or <= 0 value is
/// the invalid-pixel sentinel and is excluded from fits and lifting.
struct DepthMap {
  int width{0};
  int height{0};
  std::vector<float> values;
  DepthKind kind{DepthKind::pseudo};

  static bool valid_value(float v) { return std::isfinite(v) && v > 0.0f; }

  float at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  float& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }

  void validate() const;
};

/// Binary per-pixel anomaly mask paired with a DepthMap of equal size.
struct AnomalyMask2D {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> mask;  // nonzero = anomaly

  bool at(int x, int y) const {
    return mask[static_cast<std::size_t>(y) * width + x] != 0;
  }

  std::int64_t count() const;

  void validate() const;
};

}  // namespace voxood
