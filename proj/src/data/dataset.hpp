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
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/rng.hpp"
#include "fov/fov_estimator.hpp"
#include "geometry/geometry.hpp"

namespace pano360::data {

// The three-level training hierarchy, all normalized [-1,1].
struct ScalePyramid {
  Image small;   // 128 x 256
  Image medium;  // 256 x 512
  Image large;   // 512 x 1024
};

constexpr int kLargeHeight = 512;

// Area-downsampled pyramid from a normalized 512x1024 panorama.
ScalePyramid make_pyramid(const Image& pano);

struct GeneratedSample {
  std::array<Image, 4> views;  // [north, west, south, east], normalized
  ScalePyramid gt;
  double fov_deg = 0.0;
};

// Renders the four compass views at the shared fov and builds the pyramid.
// The panorama must be normalized with W = 2H.
GeneratedSample generate_sample(const Image& pano, double fov_deg, int view_size);

struct SampleRecord {
  std::string id;
  std::string split;  // "train" or "test"
  double fov_deg = 0.0;
  std::string src;
  std::array<std::string, 4> view_paths;  // relative to the manifest directory
  std::array<std::string, 3> gt_paths;    // small, medium, large
};

struct DatasetManifest {
  std::vector<SampleRecord> records;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  std::string fov_law = "tangent";
  double fill = 0.0;
  int view_size = 256;
  std::vector<std::string> warnings;
  std::string base_dir;  // directory the relative paths resolve against

  std::vector<const SampleRecord*> split_records(const std::string& split) const;
};

struct BuildConfig {
  std::string src_dir;
  std::string out_dir;
  double split_ratio = 0.8;
  double fov_min = 45.0;
  double fov_max = 75.0;
  std::uint64_t seed = 0;
  int view_size = 256;
  double fill = 0.0;  // normalized units
  geometry::FovScaleLaw fov_law = geometry::FovScaleLaw::tangent;
};

// Deterministic build: sorted source listing, seeded shuffle/split, per-record
// fov drawn uniformly then snapped to the classifier bin centers. Unreadable
// images are skipped with a manifest warning. Writes PNGs plus manifest.txt
// under out_dir and returns the manifest.
DatasetManifest build_dataset(const BuildConfig& cfg);

void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// Decoded record: everything normalized.
struct LoadedSample {
  std::string id;
  double fov_deg = 0.0;
  std::array<Image, 4> views;
  std::array<Image, 3> gt;  // small, medium, large
};

LoadedSample load_sample(const DatasetManifest& m, const SampleRecord& rec);

}  // namespace pano360::data
