// Copyright 2026 The SCL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCL_ERRORS_HPP_
#define SCL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scl {

// Base of every error thrown by the library. `code()` is a stable,
// machine-readable identifier used by the CLI's error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io_error", message) {}
};

// Malformed input. `row()` is the 1-based data row (0 when not row-bound).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t row = 0)
      : Error("parse_error", message), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error("invalid_argument", message) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message)
      : Error("dimension_mismatch", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error("config_error", message) {}
};

// Raised by training loops when a loss becomes NaN/Inf.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& message, std::size_t step)
      : Error("non_finite_loss", message), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// A pipeline stage ran before the stage producing its inputs.
class PrerequisiteError : public Error {
 public:
  PrerequisiteError(const std::string& message, std::string producer)
      : Error("missing_prerequisite", message), producer_(std::move(producer)) {}
  // CLI verb that produces the missing artifact.
  const std::string& producer() const { return producer_; }

 private:
  std::string producer_;
};

}  // namespace scl

#endif  // SCL_ERRORS_HPP_
