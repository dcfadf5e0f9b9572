// Copyright 2026 The ldpeff Authors
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

#ifndef LDPEFF_ERRORS_HPP
#define LDPEFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ldpeff {

// A computation exceeded a hard size cap (e.g. pattern enumeration on too
// many cells). The message says how to reconfigure.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to converge or produced an inconsistent result.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ldpeff

#endif  // LDPEFF_ERRORS_HPP
