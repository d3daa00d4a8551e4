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

#include <cstdint>
#include <string>

namespace pano360::train {

// Qualitative comparison of output formats. A tiny generator is trained twice
// on one manifest sample with an L1 objective: once per cube face (outputs
// are then warped into an equirect, which shows discontinuities at the face
// boundaries) and once directly in equirect format with azimuth-periodic
// padding (no seams by construction).
struct SeamDemoOptions {
  std::string manifest_path;
  std::string out_dir;
  int steps = 200;  // optimizer steps per format
  std::uint64_t seed = 0;
};

struct SeamDemoResult {
  std::string cubemap_pano_path;   // warped from per-face outputs
  std::string equirect_pano_path;  // native equirect output
};

SeamDemoResult run_seam_demo(const SeamDemoOptions& opt);

}  // namespace pano360::train
