// Copyright 2026 The aoi_guard Authors
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

#ifndef AOI_GUARD_ERRORS_HPP_
#define AOI_GUARD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace aoi_guard {

// Every failure raised by the library derives from Error. The CLI maps each
// category to its own exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index outside a table, source or cache bound.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Argument or model invariant violated (non-stochastic row, bad probability).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Mismatched dimensions between distributions, losses and tables.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// NaN or infinity where a finite number is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aoi_guard

#endif  // AOI_GUARD_ERRORS_HPP_
