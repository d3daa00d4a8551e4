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

#include "gan/generator.hpp"

#include <sstream>

#include "core/error.hpp"
#include "core/strings.hpp"

namespace pano360::gan {

Stage stage_from_string(const std::string& name) {
  if (name == "small") return Stage::small;
  if (name == "medium") return Stage::medium;
  if (name == "large") return Stage::large;
  throw DataError("unknown stage: " + name + " (expected small|medium|large)");
}

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::small: return "small";
    case Stage::medium: return "medium";
    case Stage::large: return "large";
  }
  throw DataError("invalid stage");
}

const char* stage_suffix(Stage s) {
  switch (s) {
    case Stage::small: return "s";
    case Stage::medium: return "m";
    case Stage::large: return "l";
  }
  throw DataError("invalid stage");
}

int stage_height(Stage s) { return 128 << static_cast<int>(s); }

std::vector<std::string> generator_group_prefixes(Stage stage) {
  const std::string sfx = stage_suffix(stage);
  return {"gen.in_bridge_" + sfx + ".", "gen.core_" + sfx + ".", "gen.out_bridge_" + sfx + "."};
}

std::string GeneratorArch::describe() const {
  std::ostringstream os;
  os << "bridge=" << bridge_channels << ";enc=";
  for (std::size_t i = 0; i < enc_channels.size(); ++i) {
    if (i) os << ",";
    os << enc_channels[i];
  }
  os << ";res_blocks=" << res_blocks << ";skips=" << (skip_connections ? 1 : 0)
     << ";wrap=" << (horizontal_wrap ? 1 : 0);
  return os.str();
}

void GeneratorArch::require_matches(const std::string& description) const {
  if (describe() != description) {
    throw DataError("generator architecture mismatch: checkpoint has '" + description +
                    "', runtime expects '" + describe() + "'");
  }
}

GeneratorArch GeneratorArch::parse(const std::string& description) {
  GeneratorArch arch;
  const auto kv = parse_kv(description);
  for (const auto& [key, val] : kv) {
    if (key == "bridge") arch.bridge_channels = parse_ints(val).at(0);
    else if (key == "enc") arch.enc_channels = parse_ints(val);
    else if (key == "res_blocks") arch.res_blocks = parse_ints(val).at(0);
    else if (key == "skips") arch.skip_connections = parse_ints(val).at(0) != 0;
    else if (key == "wrap") arch.horizontal_wrap = parse_ints(val).at(0) != 0;
    else throw DataError("generator description has unknown field: " + key);
  }
  arch.require_matches(description);  // round-trip guards missing fields
  return arch;
}

}  // namespace pano360::gan
