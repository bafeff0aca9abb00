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

#include "voxood/grid.hpp"

namespace voxood {

struct PointCloud {
  std::vector<Vec3> points;

  /// Throws ConfigError if any coordinate is non-finite.
  void validate() const;
};

/// Samples min(n, N) points without replacement, deterministically for a
/// given seed. Throws std::invalid_argument for n == 0 and Error for an
/// empty cloud.
PointCloud sample_points(const PointCloud& cloud, std::size_t n,
                         std::uint64_t seed);

}  // namespace voxood
