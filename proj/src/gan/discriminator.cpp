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

#include "gan/discriminator.hpp"

#include "core/strings.hpp"

namespace pano360::gan {

std::string DiscriminatorArch::describe() const {
  return "ch=" + join_ints(channels) + ";wrap=" + (horizontal_wrap ? "1" : "0");
}

void DiscriminatorArch::require_matches(const std::string& description) const {
  if (describe() != description) {
    throw DataError("discriminator architecture mismatch: checkpoint has '" + description +
                    "', runtime expects '" + describe() + "'");
  }
}

DiscriminatorArch DiscriminatorArch::parse(const std::string& description) {
  DiscriminatorArch arch;
  const auto kv = parse_kv(description);
  for (const auto& [key, val] : kv) {
    if (key == "ch") arch.channels = parse_ints(val);
    else if (key == "wrap") arch.horizontal_wrap = parse_ints(val).at(0) != 0;
    else throw DataError("discriminator description has unknown field: " + key);
  }
  arch.require_matches(description);
  return arch;
}

}  // namespace pano360::gan
