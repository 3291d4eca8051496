/*
 * Copyright 2026 The picker-bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PBENCH_ERROR_HPP_
#define PBENCH_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record or argument violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A JSON document lacks a field or holds one of the wrong type. field() is the
// dotted path, e.g. "design.cluster_sets".
class FieldError : public ValidationError {
 public:
  FieldError(std::string field, const std::string& what)
      : ValidationError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. line() is 1-based; 0 when not line-oriented.
class FormatError : public IoError {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : IoError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A metric whose denominator is zero. Pipelines turn this into a masked value.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace pbench

#endif  // PBENCH_ERROR_HPP_
