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

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace pano360 {

inline std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, delim)) out.push_back(tok);
  if (!s.empty() && s.back() == delim) out.push_back("");
  return out;
}

inline std::vector<int> parse_ints(const std::string& s, char delim = ',') {
  std::vector<int> out;
  for (const std::string& tok : split(s, delim)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw DataError("malformed integer list: " + s);
    }
  }
  return out;
}

inline std::string join_ints(const std::vector<int>& v, char delim = ',') {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << delim;
    os << v[i];
  }
  return os.str();
}

// "a=1;b=2,3" -> {a: "1", b: "2,3"}; duplicate or malformed entries throw.
inline std::map<std::string, std::string> parse_kv(const std::string& s, char delim = ';') {
  std::map<std::string, std::string> out;
  for (const std::string& tok : split(s, delim)) {
    if (tok.empty()) continue;
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos) throw DataError("malformed key=value entry: " + tok);
    const std::string key = tok.substr(0, eq);
    if (out.count(key)) throw DataError("duplicate key: " + key);
    out[key] = tok.substr(eq + 1);
  }
  return out;
}

}  // namespace pano360
