/* Copyright 2026 The MRRN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MRRN_ERROR_HPP_
#define MRRN_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mrrn {

// Base of every error raised by the library. The CLI maps ValidationError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied an argument that violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Operand shapes do not satisfy the shape rule of an operation.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A computation produced NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A serialized file is malformed. Carries the byte offset of the fault.
class FormatError : public Error {
 public:
  FormatError(const std::string& path, std::uint64_t offset,
              const std::string& what)
      : Error(path + ": byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrrn

#endif  // MRRN_ERROR_HPP_
