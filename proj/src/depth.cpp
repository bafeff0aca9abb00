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
#include "voxood/depth.hpp"

#include <string>

#include "voxood/errors.hpp"

namespace voxood {

void DepthMap::validate() const {
  if (width < 0 || height < 0) {
    throw ConfigError("depth map dimensions must be non-negative");
  }
  const std::size_t expected =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (values.size() != expected) {
    throw ConfigError("depth map has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(expected));
  }
}

std::int64_t AnomalyMask2D::count() const {
  std::int64_t n = 0;
  for (const std::uint8_t v : mask) {
    n += v != 0;
  }
  return n;
}

void AnomalyMask2D::validate() const {
  if (width < 0 || height < 0) {
    throw ConfigError("mask dimensions must be non-negative");
  }
  const std::size_t expected =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (mask.size() != expected) {
    throw ConfigError("mask has " + std::to_string(mask.size()) +
                      " pixels, expected " + std::to_string(expected));
  }
}

}  // namespace voxood
