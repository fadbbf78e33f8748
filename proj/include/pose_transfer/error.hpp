// Copyright 2026 The pose_transfer Authors.
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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pose_transfer {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One broken invariant found by validate().
struct Violation {
  std::string field;
  std::optional<std::size_t> frame;
  std::string message;

  std::string ToString() const {
    std::string out = field;
    if (frame) out += " (frame " + std::to_string(*frame) + ")";
    return out + ": " + message;
  }
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(Describe(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string Describe(const std::vector<Violation>& violations) {
    std::string msg = "invalid pose sequence";
    for (const auto& v : violations) msg += "; " + v.ToString();
    return msg;
  }

  std::vector<Violation> violations_;
};

// Raised by the binary reader.
class FormatError : public Error {
 public:
  enum class Kind { kNotPoseFile, kUnsupportedVersion, kTruncated, kTrailingBytes, kMalformed };

  FormatError(Kind kind, const std::string& message, std::size_t missing_bytes = 0)
      : Error(message), kind_(kind), missing_bytes_(missing_bytes) {}

  Kind kind() const { return kind_; }
  // Only meaningful for kTruncated.
  std::size_t missing_bytes() const { return missing_bytes_; }

 private:
  Kind kind_;
  std::size_t missing_bytes_;
};

}  // namespace pose_transfer
