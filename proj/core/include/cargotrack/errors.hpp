/*
 * Copyright (C) 2026 The cargotrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
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

namespace cargotrack {

/// Base class for all cargotrack errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input document (JSON, CSV) could not be parsed. The message carries
/// the origin (file path or a caller-supplied tag) and a line number when
/// one is known.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Parsed input violates a documented invariant. `field()` names the
/// offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A wire payload (uplink batch, stored record line) is malformed.
class WireError : public Error {
 public:
  using Error::Error;
};

}  // namespace cargotrack
