// Copyright 2026 The eucaug Authors
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

#include <stdexcept>
#include <string>
#include <utility>

namespace eucaug {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The document is not well-formed JSON or has the wrong shape.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A parsed document violates an invariant. `path()` names the offending field,
// e.g. "joints[2].axes".
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Euler extraction requested too close to pitch = +-pi/2.
class GimbalLock : public Error {
 public:
  using Error::Error;
};

class SingularMass : public Error {
 public:
  using Error::Error;
};

// Simulation diverged; the episode must be terminated.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

// A feature layout does not match the representation an operation requires.
class LayoutMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace eucaug
