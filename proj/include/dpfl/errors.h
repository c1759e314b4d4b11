// Copyright 2026 The dpfl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPFL_ERRORS_H_
#define DPFL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpfl {

// Invalid parameters or inconsistent shapes. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or non-finite data values.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Input file could not be parsed. `line` is 1-based, 0 when not applicable.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, int line)
      : DataError(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Query against state that cannot answer it (e.g. an empty privacy ledger).
class QueryError : public std::logic_error {
 public:
  explicit QueryError(const std::string& what) : std::logic_error(what) {}
};

// Noise calibration could not meet the requested budget.
class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace dpfl

#endif  // DPFL_ERRORS_H_
