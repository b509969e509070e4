// Copyright 2026 The NaLP Authors.
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

#ifndef NALP_ERRORS_HPP_
#define NALP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nalp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between matrices or between a checkpoint and a vocabulary.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable dataset, or an out-of-range index.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (hyperparameters, mode combinations).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed checkpoint file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Negative sampler could not find a corruption outside the dataset.
class SamplingExhaustedError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace nalp

#endif  // NALP_ERRORS_HPP_
