// Copyright 2026 The Mathlink Authors.
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

#ifndef MATHLINK_ERRORS_H_
#define MATHLINK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mathlink {

// Base class for all errors raised by the library. kind() is a stable
// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string &kind() const { return kind_; }

 private:
  std::string kind_;
};

// Malformed input file.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string &message) : Error("format_error", message) {}
};

// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &message)
      : Error("validation_error", message) {}
};

// Caller broke a function precondition (shape mismatch and the like).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string &message) : Error("contract_error", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &message) : Error("config_error", message) {}
};

// A rate was requested over an empty population.
class UndefinedRateError : public Error {
 public:
  explicit UndefinedRateError(const std::string &message)
      : Error("undefined_rate", message) {}
};

// Input longer than the encoder window.
class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string &message) : Error("overflow_error", message) {}
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string &message)
      : Error("divergence_error", message) {}
};

}  // namespace mathlink

#endif  // MATHLINK_ERRORS_H_
