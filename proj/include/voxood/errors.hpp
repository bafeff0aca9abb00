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

#include <stdexcept>
#include <string>

namespace voxood {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A referenced input file does not exist or cannot be opened.
class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& msg) : Error(msg) {}
};

/// Invalid configuration, schema violation, or inconsistent inputs.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// File-format errors: bad magic, malformed header, unknown dtype.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// Payload length does not match a header (or expected raw layout).
class SizeMismatchError : public Error {
 public:
  explicit SizeMismatchError(const std::string& msg) : Error(msg) {}
};

/// A metric is undefined on the given input (e.g. single-class labels).
class MetricUndefinedError : public Error {
 public:
  explicit MetricUndefinedError(const std::string& msg) : Error(msg) {}
};

/// An aggregation step received no inputs.
class EmptyAggregationError : public Error {
 public:
  explicit EmptyAggregationError(const std::string& msg) : Error(msg) {}
};

/// Iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace voxood
