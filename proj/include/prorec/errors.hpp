// Copyright 2026 The ProRec Authors.
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

#ifndef PROREC_ERRORS_HPP_
#define PROREC_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prorec {

// Error categories map onto CLI exit codes: config -> 1, data -> 2,
// numerical -> 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched matrix dimensions between two inputs of one operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A marginal entry of zero hit a division.
class DegenerateMarginalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A user whose scores cannot be split or normalized.
class DegenerateUserError : public DataError {
 public:
  using DataError::DataError;
};

class UnsupportedSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Linear system without a unique solution; `row` names the first row whose
// solve failed.
class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(const std::string& what, std::ptrdiff_t row)
      : NumericalError(what), row_(row) {}
  std::ptrdiff_t row() const { return row_; }

 private:
  std::ptrdiff_t row_;
};

// Warnings go to stderr unless silenced (tests silence them).
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);
std::size_t warning_count();

}  // namespace prorec

#endif  // PROREC_ERRORS_HPP_
