// Copyright 2026 The Driftscope Authors.
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

#ifndef DRIFTSCOPE_ERROR_H_
#define DRIFTSCOPE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace driftscope {

// Base class for every error raised by the library. Anything deriving from
// DataError describes bad input; NumericalError describes a computation that
// could not produce a finite answer.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed JSON (or other syntax) on a given 1-based line.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed record that violates the schema. `field` names the offending
// field (e.g. "tokens[2].pos").
class ValidationError : public DataError {
 public:
  ValidationError(std::size_t line, std::string field, const std::string& what)
      : DataError((line ? "line " + std::to_string(line) + ": " : std::string()) +
                  "field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Persisted file (profile, model, score file) that cannot be read back.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace driftscope

#endif  // DRIFTSCOPE_ERROR_H_
