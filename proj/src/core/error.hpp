// Copyright 2026 The pano360 Authors
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

namespace pano360 {

// Bad inputs: malformed images, violated preconditions, unreadable files.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unrecoverable runtime failure, e.g. a non-finite loss during training.
class RuntimeAbort : public std::runtime_error {
 public:
  explicit RuntimeAbort(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pano360
