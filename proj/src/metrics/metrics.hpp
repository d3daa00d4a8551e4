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

#include <string>
#include <vector>

#include "core/image.hpp"
#include "data/dataset.hpp"
#include "train/trainer.hpp"

namespace pano360::metrics {

// 10*log10(peak^2 / MSE) over every pixel and channel; identical images
// return +infinity.
double psnr(const Image& a, const Image& b, double peak = 255.0);

// Windowed SSIM on the luminance plane: 11x11 Gaussian window with sigma 1.5,
// C1 = (0.01*peak)^2, C2 = (0.03*peak)^2, averaged over valid windows (both
// dims must be at least 11).
double ssim(const Image& a, const Image& b, double peak = 255.0);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<long> counts;

  Histogram(double lo_, double hi_, int bins) : lo(lo_), hi(hi_), counts(bins, 0) {}
  // Out-of-range values (including +inf) land in the edge bins, so counts
  // always sum to the number of added records.
  void add(double v);
};

struct EvalRow {
  std::string id;
  double fov_gt = 0.0;
  double fov_pred = 0.0;
  double ssim_v = 0.0;
  double psnr_db = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mean_ssim = 0.0;
  double mean_psnr = 0.0;  // +inf if any row is +inf
  Histogram ssim_hist{0.0, 1.0, 50};
  Histogram psnr_hist{5.0, 40.0, 50};
  int height = 0;  // comparison resolution (the checkpoint stage's)
  int width = 0;
};

struct EvalOptions {
  std::string split = "test";
  std::string out_csv;  // histogram CSVs (and plots) derive their names from it
  bool plots = false;   // also render the histograms as PNG bar charts
};

// Runs inference (predicted fov) on every record of the split and scores the
// u8 renderings against the ground-truth pyramid level matching the
// checkpoint's stage. Writes the per-record CSV, the two histogram CSVs, and
// per-record predictions into $PANO360_CACHE when that is set.
EvalReport evaluate(const train::InferenceModel& model, const data::DatasetManifest& manifest,
                    const EvalOptions& opt);

}  // namespace pano360::metrics
