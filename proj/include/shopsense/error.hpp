// Copyright 2026 The Shopsense Authors. All Rights Reserved.
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
#include <vector>

namespace shopsense {

// Root of every error the library throws. Callers that only care about
// "something in the analysis failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document. `line()` is 1-based, 0 when not line-oriented.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CalibrationError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class PoseArityError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class InvalidValue : public Error {
 public:
  using Error::Error;
};

class LowVisibility : public Error {
 public:
  using Error::Error;
};

class EmptyPatch : public Error {
 public:
  using Error::Error;
};

class TooFewPixels : public Error {
 public:
  using Error::Error;
};

class NoCommonFeatures : public Error {
 public:
  using Error::Error;
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

class NoEmployee : public Error {
 public:
  using Error::Error;
};

class AmbiguousEmployee : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class ZeroTruth : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// An aggregate identity that must hold on every run did not.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Non-fatal findings collected along the pipeline and surfaced in reports.
struct Diagnostic {
  std::string code;
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline void note(Diagnostics* sink, std::string code, std::string message) {
  if (sink) sink->push_back({std::move(code), std::move(message)});
}

}  // namespace shopsense
