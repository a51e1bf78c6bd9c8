// Copyright 2026 The blindspot authors
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

#ifndef BLINDSPOT_ERRORS_HPP
#define BLINDSPOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace blindspot {

/// Raised when user-supplied data violates a documented precondition
/// (bad weights, mismatched alphabets, unknown judge names, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on file-system failures: missing paths, unreadable streams.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Tolerance split: user-supplied data is validated at 1e-9; identities the
// library derives internally must agree to 1e-12.
inline constexpr double kInputTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;

}  // namespace blindspot

#endif  // BLINDSPOT_ERRORS_HPP
