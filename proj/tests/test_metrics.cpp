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

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "data/dataset.hpp"
#include "doctest.h"
#include "metrics/metrics.hpp"
#include "test_util.hpp"
#include "train/train_config.hpp"
#include "train/trainer.hpp"

using namespace pano360;
using namespace pano360::metrics;

namespace {

Image noisy_copy(const Image& src, double amplitude, std::uint64_t seed) {
  Rng rng(seed);
  Image out = src;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = out.data()[i] + rng.uniform(-amplitude, amplitude);
    out.data()[i] = static_cast<float>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

}  // namespace

TEST_CASE("psnr closed forms") {
  const Image a = testutil::sphere_pano(1, 64);
  CHECK(std::isinf(psnr(a, a)));

  // A uniform +10 offset has MSE 100: psnr = 10 log10(255^2 / 100).
  Image b(32, 32, 3, ValueRange::u8, 100.0f);
  Image c(32, 32, 3, ValueRange::u8, 110.0f);
  const double expect = 10.0 * std::log10(255.0 * 255.0 / 100.0);
  CHECK(psnr(b, c) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(psnr(c, b) == doctest::Approx(expect).epsilon(1e-9));

  // Against the independent row-band oracle on real content.
  const Image n = noisy_copy(a, 6.0, 2);
  CHECK(psnr(a, n) == doctest::Approx(testutil::psnr_rows(a, n, 0, a.height())).epsilon(1e-9));

  Image wrong(16, 16, 3, ValueRange::u8);
  CHECK_THROWS_AS(psnr(a, wrong), DataError);
}

TEST_CASE("ssim closed forms and ordering") {
  const Image a = testutil::sphere_pano(4, 64);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  // Two constant images: all variances vanish, leaving the luminance term
  // (2ab + C1) / (a^2 + b^2 + C1).
  Image ca(24, 24, 1, ValueRange::u8, 100.0f);
  Image cb(24, 24, 1, ValueRange::u8, 120.0f);
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double expect = (2.0 * 100.0 * 120.0 + c1) / (100.0 * 100.0 + 120.0 * 120.0 + c1);
  CHECK(ssim(ca, cb) == doctest::Approx(expect).epsilon(1e-6));
  CHECK(ssim(cb, ca) == doctest::Approx(ssim(ca, cb)).epsilon(1e-12));

  // More noise, less similarity; always within [-1, 1].
  const double s_low = ssim(a, noisy_copy(a, 8.0, 5));
  const double s_high = ssim(a, noisy_copy(a, 40.0, 5));
  CHECK(s_low > s_high);
  CHECK(s_low < 1.0);
  CHECK(s_high > -1.0);

  // An RGB image with equal channels scores the same as its gray plane.
  Image rgb(32, 32, 3, ValueRange::u8);
  Image gray(32, 32, 1, ValueRange::u8);
  Rng rng(6);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      const float v = static_cast<float>(rng.uniform(0.0, 255.0));
      gray.at(y, x, 0) = v;
      for (int c = 0; c < 3; ++c) rgb.at(y, x, c) = v;
    }
  Image rgb2 = noisy_copy(rgb, 12.0, 7);
  Image gray2(32, 32, 1, ValueRange::u8);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) gray2.at(y, x, 0) = rgb2.at(y, x, 0);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      for (int c = 1; c < 3; ++c) rgb2.at(y, x, c) = rgb2.at(y, x, 0);
  CHECK(ssim(rgb, rgb2) == doctest::Approx(ssim(gray, gray2)).epsilon(1e-5));
}

TEST_CASE("histogram clamps out-of-range values to the edge bins") {
  Histogram h(0.0, 1.0, 10);
  h.add(-5.0);
  h.add(0.0);
  h.add(0.05);
  h.add(0.95);
  h.add(1.0);
  h.add(2.0);
  CHECK(h.counts[0] == 3);
  CHECK(h.counts[9] == 3);
  h.add(0.55);
  CHECK(h.counts[5] == 1);
  long total = 0;
  for (long c : h.counts) total += c;
  CHECK(total == 7);
}

TEST_CASE("evaluate scores a checkpoint and writes the report family") {
  // Toy dataset with a test split and a short small-stage training run.
  const std::string src = testutil::fresh_dir("ev_src");
  testutil::write_panos(src, 4, 700, 256);
  data::BuildConfig dcfg;
  dcfg.src_dir = src;
  dcfg.out_dir = testutil::fresh_dir("ev_data");
  dcfg.split_ratio = 0.5;
  dcfg.seed = 3;
  dcfg.view_size = 64;
  data::build_dataset(dcfg);
  const std::string manifest_path = dcfg.out_dir + "/manifest.txt";

  train::TrainOptions topt;
  topt.manifest_path = manifest_path;
  topt.stage = gan::Stage::small;
  topt.config = train::TrainConfig::parse_text("steps_per_stage = 2\nseed = 8\n");
  topt.out_dir = testutil::fresh_dir("ev_out");
  topt.arches.gen.bridge_channels = 8;
  topt.arches.gen.enc_channels = {8, 12, 12, 16};
  topt.arches.disc.channels = {8, 8, 8, 8};
  topt.arches.fov_net.channels = {8, 16, 16};
  topt.arches.fov_net.input_resize = 32;
  const train::TrainResult tres = train::train_stage(topt);

  const train::InferenceModel model = train::load_inference_model(tres.checkpoint_path);
  const data::DatasetManifest manifest = data::load_manifest(manifest_path);

  const std::string rep_dir = testutil::fresh_dir("ev_rep");
  const std::string cache_dir = rep_dir + "/cache";
  ::setenv("PANO360_CACHE", cache_dir.c_str(), 1);
  EvalOptions eopt;
  eopt.split = "test";
  eopt.out_csv = rep_dir + "/report.csv";
  eopt.plots = true;
  const EvalReport rep = evaluate(model, manifest, eopt);
  ::unsetenv("PANO360_CACHE");

  const std::size_t n_test = manifest.split_records("test").size();
  REQUIRE(n_test >= 1);
  CHECK(rep.rows.size() == n_test);
  CHECK(rep.height == 128);
  CHECK(rep.width == 256);
  for (const EvalRow& row : rep.rows) {
    CHECK(row.ssim_v >= -1.0);
    CHECK(row.ssim_v <= 1.0);
    CHECK(row.psnr_db > 0.0);
    CHECK(row.fov_gt >= 45.0);
    CHECK(row.fov_gt <= 75.0);
  }

  namespace fs = std::filesystem;
  CHECK(fs::exists(rep_dir + "/report.csv"));
  CHECK(fs::exists(rep_dir + "/report_ssim_hist.csv"));
  CHECK(fs::exists(rep_dir + "/report_psnr_hist.csv"));
  CHECK(fs::exists(rep_dir + "/report_ssim_hist.png"));
  CHECK(fs::exists(rep_dir + "/report_psnr_hist.png"));
  for (const EvalRow& row : rep.rows) CHECK(fs::exists(cache_dir + "/" + row.id + "_pred.png"));

  // Report header and the mean trailer.
  const auto bytes = testutil::read_file(rep_dir + "/report.csv");
  const std::string text(bytes.begin(), bytes.end());
  CHECK(text.rfind("# pano360-eval v1", 0) == 0);
  CHECK(text.find("id,fov_gt,fov_pred,ssim,psnr_db") != std::string::npos);
  CHECK(text.find("# mean_ssim=") != std::string::npos);
  CHECK(text.find("mean_psnr=") != std::string::npos);

  // Histogram totals match the row count.
  long total = 0;
  for (long c : rep.ssim_hist.counts) total += c;
  CHECK(total == static_cast<long>(rep.rows.size()));

  CHECK_THROWS_AS(
      [&] {
        EvalOptions bad;
        bad.split = "validation";
        bad.out_csv = rep_dir + "/x.csv";
        return evaluate(model, manifest, bad);
      }(),
      DataError);
}

TEST_CASE("evaluating a perfect predictor reports ssim 1 and infinite psnr") {
  // Direct row computation: identical prediction and target.
  const Image gt = testutil::sphere_pano(9, 64);
  CHECK(ssim(gt, gt) == doctest::Approx(1.0));
  CHECK(std::isinf(psnr(gt, gt)));
}
