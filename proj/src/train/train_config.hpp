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

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "gan/generator.hpp"

namespace pano360::train {

// Flat key=value training configuration. Optimizer defaults follow the
// training recipe; unknown keys are rejected rather than ignored.
struct TrainConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.99;
  int batch_size = 1;  // the pipeline is defined for batch size 1
  double lambda_pix = 100.0;
  std::array<int, 3> steps_per_stage = {2000, 2000, 2000};  // small, medium, large
  std::string stage_order = "small,medium,large";  // progressive order is fixed
  std::uint64_t seed = 0;

  int steps_for(gan::Stage s) const { return steps_per_stage[static_cast<std::size_t>(s)]; }

  static TrainConfig parse_file(const std::string& path);
  static TrainConfig parse_text(const std::string& text);

  // Canonical key=value echo (sorted keys), embedded in checkpoints.
  std::map<std::string, std::string> echo() const;
};

}  // namespace pano360::train
