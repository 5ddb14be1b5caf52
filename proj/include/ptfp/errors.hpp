/*
 * Copyright 2026 The ptfp-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace ptfp {

/// Base class for all ptfp errors. The CLI maps subclasses onto exit codes:
/// usage -> 2, parse/config -> 3, capacity -> 4, numeric -> 5.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Raised when a sample cannot be represented as optical intensity
/// (negative or non-finite) or lies outside the normalized [0, 1] range.
class EncodingError : public Error {
public:
  using Error::Error;
};

class AlignmentError : public Error {
public:
  using Error::Error;
};

class CalibrationError : public Error {
public:
  using Error::Error;
};

/// Target weight lies outside the monotone branch of a weight-voltage LUT.
class UnreachableWeightError : public CalibrationError {
public:
  UnreachableWeightError(double target, double lo, double hi)
      : CalibrationError("weight " + std::to_string(target) +
                         " unreachable; achievable range [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]"),
        target(target), achievable_min(lo), achievable_max(hi) {}
  double target;
  double achievable_min;
  double achievable_max;
};

class SyncError : public Error {
public:
  using Error::Error;
};

/// Kernel does not fit the chip and the requested tiling is disabled.
class CapacityError : public Error {
public:
  CapacityError(const std::string& what, int required_taps)
      : Error(what), required_taps(required_taps) {}
  int required_taps;
};

class NumericError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class UsageError : public Error {
public:
  using Error::Error;
};

}  // namespace ptfp
