// Copyright 2026 The spikecp Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spikecp {

/// Input outside the domain of a closed form (pole, subcritical spike, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative routine did not reach its tolerance within its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or parameters that do not fit together.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sample spike too close to the bulk to invert the bias map.
class IdentifiabilityError : public DomainError {
 public:
  IdentifiabilityError(std::size_t spike, const std::string& what)
      : DomainError(what), spike_(spike) {}

  /// 1-based index of the offending spike.
  std::size_t spike() const noexcept { return spike_; }

 private:
  std::size_t spike_;
};

/// Malformed input file; line and column are 1-based (0 if unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace spikecp
