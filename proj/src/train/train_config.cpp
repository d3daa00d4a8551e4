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

#include "train/train_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace pano360::train {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::array<int, 3> parse_steps(const std::string& v) {
  std::array<int, 3> out{};
  std::vector<int> vals;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw DataError("steps_per_stage: empty entry");
    vals.push_back(std::stoi(tok));
  }
  if (vals.size() == 1) {
    out.fill(vals[0]);
  } else if (vals.size() == 3) {
    out = {vals[0], vals[1], vals[2]};
  } else {
    throw DataError("steps_per_stage must be one count or three comma-separated counts");
  }
  for (int s : out)
    if (s < 1) throw DataError("steps_per_stage entries must be >= 1");
  return out;
}

}  // namespace

TrainConfig TrainConfig::parse_text(const std::string& text) {
  TrainConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) throw DataError("config key '" + key + "' has no value");
    try {
      if (key == "lr") cfg.lr = std::stod(val);
      else if (key == "beta1") cfg.beta1 = std::stod(val);
      else if (key == "beta2") cfg.beta2 = std::stod(val);
      else if (key == "batch_size") cfg.batch_size = std::stoi(val);
      else if (key == "lambda_pix") cfg.lambda_pix = std::stod(val);
      else if (key == "steps_per_stage") cfg.steps_per_stage = parse_steps(val);
      else if (key == "stage_order") cfg.stage_order = val;
      else if (key == "seed") cfg.seed = std::stoull(val);
      else throw DataError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
      throw DataError("config key '" + key + "': malformed value '" + val + "'");
    } catch (const std::out_of_range&) {
      throw DataError("config key '" + key + "': value out of range '" + val + "'");
    }
  }
  if (cfg.lr <= 0.0) throw DataError("lr must be positive");
  if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
    throw DataError("beta1/beta2 must lie in [0,1)");
  if (cfg.batch_size != 1) throw DataError("batch_size must be 1 (the pipeline is defined for batch size 1)");
  if (cfg.lambda_pix < 0.0) throw DataError("lambda_pix must be >= 0");
  if (cfg.stage_order != "small,medium,large")
    throw DataError("stage_order must be small,medium,large (progressive order is fixed)");
  return cfg;
}

TrainConfig TrainConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open config: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_text(buf.str());
}

std::map<std::string, std::string> TrainConfig::echo() const {
  char buf[64];
  std::map<std::string, std::string> m;
  auto put_d = [&](const char* k, double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    m[k] = buf;
  };
  put_d("lr", lr);
  put_d("beta1", beta1);
  put_d("beta2", beta2);
  m["batch_size"] = std::to_string(batch_size);
  put_d("lambda_pix", lambda_pix);
  m["steps_per_stage"] = std::to_string(steps_per_stage[0]) + "," +
                         std::to_string(steps_per_stage[1]) + "," +
                         std::to_string(steps_per_stage[2]);
  m["stage_order"] = stage_order;
  m["seed"] = std::to_string(seed);
  return m;
}

}  // namespace pano360::train
