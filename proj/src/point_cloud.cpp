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
#include "voxood/point_cloud.hpp"

#include <numeric>
#include <random>
#include <stdexcept>

#include "voxood/errors.hpp"

namespace voxood {
namespace {

// Unbiased bounded draw on top of mt19937_64, kept explicit so sampling is
// stable across standard library implementations.
std::uint64_t bounded_uint64(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t value = rng();
  while (value >= limit) {
    value = rng();
  }
  return value % bound;
}

}  // namespace

void PointCloud::validate() const {
  for (const Vec3& p : points) {
    if (!p.allFinite()) {
      throw ConfigError("point cloud contains non-finite coordinates");
    }
  }
}

PointCloud sample_points(const PointCloud& cloud, std::size_t n,
                         std::uint64_t seed) {
  if (n == 0) {
    throw std::invalid_argument("sample_points: n must be >= 1");
  }
  if (cloud.points.empty()) {
    throw Error("sample_points: cannot sample from an empty cloud");
  }
  const std::size_t total = cloud.points.size();
  const std::size_t take = std::min(n, total);

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Partial Fisher-Yates: the first `take` slots become the sample.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + bounded_uint64(rng, total - i);
    std::swap(order[i], order[j]);
  }

  PointCloud out;
  out.points.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.points.push_back(cloud.points[order[i]]);
  }
  return out;
}

}  // namespace voxood
