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

#include <fstream>
#include <set>

#include "data/dataset.hpp"
#include "doctest.h"
#include "fov/fov_estimator.hpp"
#include "test_util.hpp"

using namespace pano360;
using namespace pano360::data;

TEST_CASE("make_pyramid produces the three scales by area averaging") {
  Image pano = testutil::sphere_pano(5, 512);
  pano = normalize_image(pano);
  const ScalePyramid pyr = make_pyramid(pano);
  REQUIRE(pyr.small.height() == 128);
  REQUIRE(pyr.small.width() == 256);
  REQUIRE(pyr.medium.height() == 256);
  REQUIRE(pyr.medium.width() == 512);
  REQUIRE(pyr.large.height() == 512);
  REQUIRE(pyr.large.width() == 1024);

  // Integer-factor area resize: each small pixel is the mean of its 4x4 block.
  for (int y : {0, 17, 127}) {
    for (int x : {0, 63, 255}) {
      double acc = 0.0;
      for (int dy = 0; dy < 4; ++dy)
        for (int dx = 0; dx < 4; ++dx) acc += pano.at(4 * y + dy, 4 * x + dx, 1);
      CHECK(pyr.small.at(y, x, 1) == doctest::Approx(acc / 16.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("generate_sample renders four normalized compass views and the pyramid") {
  Image pano = normalize_image(testutil::sphere_pano(9, 512));
  const GeneratedSample s = generate_sample(pano, 60.0, 128);
  for (const Image& v : s.views) {
    CHECK(v.height() == 128);
    CHECK(v.width() == 128);
    CHECK(v.channels() == 3);
    CHECK(v.range() == ValueRange::normalized);
  }
  CHECK(s.fov_deg == 60.0);
  CHECK(s.gt.large.range() == ValueRange::normalized);

  // The north view at the sample fov matches a direct render.
  const Image north = geometry::render_view(pano, 0.0, 0.0, 60.0, 128);
  double max_diff = 0.0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x)
      max_diff = std::max(max_diff, std::abs(static_cast<double>(north.at(y, x, 0)) -
                                             s.views[0].at(y, x, 0)));
  CHECK(max_diff == doctest::Approx(0.0));
}

TEST_CASE("build_dataset is deterministic, splits by ratio, and snaps fov to bins") {
  const std::string src = testutil::fresh_dir("ds_src");
  testutil::write_panos(src, 5, 100, 256);

  BuildConfig cfg;
  cfg.src_dir = src;
  cfg.out_dir = testutil::fresh_dir("ds_out_a");
  cfg.split_ratio = 0.8;
  cfg.seed = 42;
  cfg.view_size = 64;
  const DatasetManifest a = build_dataset(cfg);

  cfg.out_dir = testutil::fresh_dir("ds_out_b");
  const DatasetManifest b = build_dataset(cfg);

  REQUIRE(a.records.size() == 5);
  CHECK(a.split_records("train").size() == 4);
  CHECK(a.split_records("test").size() == 1);

  // Byte-identical manifests (modulo the differing base dir, which only
  // lives in the path argument) and sample images.
  CHECK(testutil::files_identical(std::string(a.base_dir) + "/manifest.txt",
                                  std::string(b.base_dir) + "/manifest.txt"));
  for (const SampleRecord& r : a.records) {
    CHECK(testutil::files_identical(a.base_dir + "/" + r.view_paths[0],
                                    b.base_dir + "/" + r.view_paths[0]));
    CHECK(testutil::files_identical(a.base_dir + "/" + r.gt_paths[2],
                                    b.base_dir + "/" + r.gt_paths[2]));
  }

  const fov::FovClassSpec bins;
  for (const SampleRecord& r : a.records) {
    CHECK(bins.snap(r.fov_deg) == doctest::Approx(r.fov_deg));
    CHECK(r.fov_deg >= 45.0);
    CHECK(r.fov_deg <= 75.0);
  }

  // Different seed, different assignment.
  cfg.out_dir = testutil::fresh_dir("ds_out_c");
  cfg.seed = 43;
  const DatasetManifest c = build_dataset(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < c.records.size(); ++i)
    any_diff = any_diff || c.records[i].fov_deg != a.records[i].fov_deg ||
               c.records[i].src != a.records[i].src;
  CHECK(any_diff);
}

TEST_CASE("build_dataset skips unreadable sources with a manifest warning") {
  const std::string src = testutil::fresh_dir("ds_src_bad");
  testutil::write_panos(src, 2, 7, 128);
  std::ofstream(src + "/pano_zzz.png") << "this is not a png";

  BuildConfig cfg;
  cfg.src_dir = src;
  cfg.out_dir = testutil::fresh_dir("ds_out_bad");
  cfg.view_size = 32;
  const DatasetManifest m = build_dataset(cfg);
  CHECK(m.records.size() == 2);
  REQUIRE(m.warnings.size() == 1);
  CHECK(m.warnings[0].find("pano_zzz.png") != std::string::npos);
}

TEST_CASE("manifest save/load round trip preserves records and header fields") {
  const std::string src = testutil::fresh_dir("ds_src_rt");
  testutil::write_panos(src, 3, 21, 128);

  BuildConfig cfg;
  cfg.src_dir = src;
  cfg.out_dir = testutil::fresh_dir("ds_out_rt");
  cfg.seed = 9;
  cfg.view_size = 32;
  const DatasetManifest m = build_dataset(cfg);

  const DatasetManifest l = load_manifest(cfg.out_dir + "/manifest.txt");
  CHECK(l.seed == m.seed);
  CHECK(l.split_ratio == doctest::Approx(m.split_ratio));
  CHECK(l.fov_law == m.fov_law);
  CHECK(l.view_size == m.view_size);
  REQUIRE(l.records.size() == m.records.size());
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    CHECK(l.records[i].id == m.records[i].id);
    CHECK(l.records[i].split == m.records[i].split);
    CHECK(l.records[i].fov_deg == doctest::Approx(m.records[i].fov_deg));
    CHECK(l.records[i].view_paths == m.records[i].view_paths);
    CHECK(l.records[i].gt_paths == m.records[i].gt_paths);
  }

  const LoadedSample s = load_sample(l, l.records[0]);
  CHECK(s.views[0].range() == ValueRange::normalized);
  CHECK(s.views[0].height() == 32);
  CHECK(s.gt[0].height() == 128);
  CHECK(s.gt[1].height() == 256);
  CHECK(s.gt[2].height() == 512);
}
