//
// Copyright 2026 The dsigma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DSIGMA_ERRORS_HPP_
#define DSIGMA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dsigma {

// Base class for every error raised by the library. The CLI maps all of
// these to the validation exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument value was violated (negative radius,
// empty dataset, invalid category, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two sequences or permutations that must have equal length do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An exact/exhaustive routine was asked to run beyond its enumeration bound.
class ScaleError : public Error {
 public:
  using Error::Error;
};

// The requested combination of options has no implementation
// (e.g. Mallows sampling under Hamming distance).
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dsigma

#endif  // DSIGMA_ERRORS_HPP_
