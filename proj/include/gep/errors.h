// Copyright 2026 The GEP Authors.
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

#ifndef GEP_ERRORS_H_
#define GEP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gep {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated: wrong shapes, non-finite data, bad thresholds.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The requested quantity is not defined for this input (e.g. stable rank
// of a zero matrix).
class UndefinedValue : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

// Closed-form calibration requested outside epsilon <= 2 log(1/delta).
class OutOfRegime : public Error {
 public:
  using Error::Error;
};

class CalibrationFailure : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite parameter or velocity.
class Divergence : public Error {
 public:
  using Error::Error;
};

// Malformed CSV / metrics input. The message carries the location.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration (unknown key, bad value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gep

#endif  // GEP_ERRORS_H_
