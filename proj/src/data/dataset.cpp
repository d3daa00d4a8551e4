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

#include "data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/image_io.hpp"

namespace fs = std::filesystem;

namespace pano360::data {

namespace {

constexpr const char* kViewNames[4] = {"view_n.png", "view_w.png", "view_s.png", "view_e.png"};
constexpr const char* kGtNames[3] = {"gt_s.png", "gt_m.png", "gt_l.png"};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> list_panoramas(const std::string& dir) {
  if (!fs::is_directory(dir)) throw DataError("source directory not found: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no readable panoramas in source directory: " + dir);
  return files;
}

// Key=value token parser for manifest lines.
std::string token_value(const std::string& line, const std::string& key) {
  const std::string pat = key + "=";
  std::size_t pos = 0;
  while (true) {
    pos = line.find(pat, pos);
    if (pos == std::string::npos) throw DataError("manifest line missing field '" + key + "'");
    if (pos == 0 || line[pos - 1] == ' ') break;
    pos += pat.size();
  }
  const std::size_t start = pos + pat.size();
  const std::size_t end = line.find(' ', start);
  return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::array<std::string, 4> split4(const std::string& csv) {
  std::array<std::string, 4> out;
  std::stringstream ss(csv);
  for (auto& s : out) {
    if (!std::getline(ss, s, ',') || s.empty()) throw DataError("manifest: expected 4 paths");
  }
  return out;
}

std::array<std::string, 3> split3(const std::string& csv) {
  std::array<std::string, 3> out;
  std::stringstream ss(csv);
  for (auto& s : out) {
    if (!std::getline(ss, s, ',') || s.empty()) throw DataError("manifest: expected 3 paths");
  }
  return out;
}

}  // namespace

ScalePyramid make_pyramid(const Image& pano) {
  require_equirect(pano);
  if (pano.height() != kLargeHeight)
    throw DataError("pyramid source must be 512x1024 (resample first)");
  if (pano.range() != ValueRange::normalized)
    throw DataError("pyramid source must be normalized");
  ScalePyramid p;
  p.large = pano;
  p.medium = resize_area(pano, kLargeHeight / 2, kLargeHeight);
  p.small = resize_area(pano, kLargeHeight / 4, kLargeHeight / 2);
  return p;
}

GeneratedSample generate_sample(const Image& pano, double fov_deg, int view_size) {
  require_equirect(pano);
  if (pano.range() != ValueRange::normalized)
    throw DataError("generate_sample expects a normalized panorama");
  if (fov_deg <= 0.0 || fov_deg > 90.0) throw DataError("sample fov must lie in (0,90]");
  GeneratedSample s;
  s.fov_deg = fov_deg;
  const double yaws[4] = {0.0, 90.0, 180.0, 270.0};
  for (int i = 0; i < 4; ++i)
    s.views[static_cast<std::size_t>(i)] =
        geometry::render_view(pano, yaws[i], 0.0, fov_deg, view_size);
  const Image src =
      pano.height() == kLargeHeight ? pano : resize_bilinear(pano, kLargeHeight, 2 * kLargeHeight);
  s.gt = make_pyramid(src);
  return s;
}

DatasetManifest build_dataset(const BuildConfig& cfg) {
  if (cfg.split_ratio < 0.0 || cfg.split_ratio > 1.0) throw DataError("split ratio must be in [0,1]");
  if (cfg.fov_min > cfg.fov_max || cfg.fov_min <= 0.0 || cfg.fov_max > 90.0)
    throw DataError("fov range must satisfy 0 < min <= max <= 90");
  if (cfg.view_size < 16) throw DataError("view size too small");

  std::vector<std::string> files = list_panoramas(cfg.src_dir);
  Rng rng(cfg.seed);
  // Fisher-Yates over the sorted listing.
  for (std::size_t i = files.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)));
    std::swap(files[i - 1], files[j]);
  }

  DatasetManifest m;
  m.split_ratio = cfg.split_ratio;
  m.seed = cfg.seed;
  m.fov_law = geometry::fov_scale_law_name(cfg.fov_law);
  m.fill = cfg.fill;
  m.view_size = cfg.view_size;
  m.base_dir = cfg.out_dir;

  std::vector<std::string> readable;
  for (const std::string& f : files) {
    try {
      (void)load_image(f);
      readable.push_back(f);
    } catch (const DataError& e) {
      m.warnings.push_back("skipped unreadable image: " + f + " (" + e.what() + ")");
    }
  }
  if (readable.empty()) throw DataError("no readable panoramas in source directory: " + cfg.src_dir);

  const fov::FovClassSpec bins;
  const std::size_t n_train =
      static_cast<std::size_t>(std::lround(cfg.split_ratio * static_cast<double>(readable.size())));
  fs::create_directories(cfg.out_dir);

  for (std::size_t i = 0; i < readable.size(); ++i) {
    Image pano = load_image(readable[i]);
    if (pano.width() != 2 * kLargeHeight || pano.height() != kLargeHeight)
      pano = resize_bilinear(pano, kLargeHeight, 2 * kLargeHeight);
    pano = normalize_image(pano);

    const double fov = bins.snap(rng.uniform(cfg.fov_min, cfg.fov_max));
    GeneratedSample sample = generate_sample(pano, fov, cfg.view_size);

    SampleRecord rec;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "%06zu", i);
    rec.id = idbuf;
    rec.split = i < n_train ? "train" : "test";
    rec.fov_deg = fov;
    rec.src = readable[i];
    const std::string rel = rec.split + "/" + rec.id;
    fs::create_directories(fs::path(cfg.out_dir) / rel);
    for (int v = 0; v < 4; ++v) {
      rec.view_paths[static_cast<std::size_t>(v)] = rel + "/" + kViewNames[v];
      save_image(sample.views[static_cast<std::size_t>(v)],
                 (fs::path(cfg.out_dir) / rec.view_paths[static_cast<std::size_t>(v)]).string());
    }
    const Image* levels[3] = {&sample.gt.small, &sample.gt.medium, &sample.gt.large};
    for (int g = 0; g < 3; ++g) {
      rec.gt_paths[static_cast<std::size_t>(g)] = rel + "/" + kGtNames[g];
      save_image(*levels[g],
                 (fs::path(cfg.out_dir) / rec.gt_paths[static_cast<std::size_t>(g)]).string());
    }
    m.records.push_back(std::move(rec));
  }

  save_manifest(m, (fs::path(cfg.out_dir) / "manifest.txt").string());
  return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write manifest: " + path);
  os << "# pano360-manifest v1\n";
  os << "# split_ratio=" << format_double(m.split_ratio) << "\n";
  os << "# seed=" << m.seed << "\n";
  os << "# fov_law=" << m.fov_law << "\n";
  os << "# fill=" << format_double(m.fill) << "\n";
  os << "# view_size=" << m.view_size << "\n";
  for (const std::string& w : m.warnings) os << "# warning=" << w << "\n";
  for (const SampleRecord& r : m.records) {
    os << "id=" << r.id << " split=" << r.split << " fov_deg=" << format_double(r.fov_deg)
       << " src=" << r.src << " views=" << r.view_paths[0] << "," << r.view_paths[1] << ","
       << r.view_paths[2] << "," << r.view_paths[3] << " gt=" << r.gt_paths[0] << ","
       << r.gt_paths[1] << "," << r.gt_paths[2] << "\n";
  }
  if (!os) throw DataError("manifest write failed: " + path);
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest: " + path);
  DatasetManifest m;
  m.base_dir = fs::path(path).parent_path().string();
  if (m.base_dir.empty()) m.base_dir = ".";
  std::string line;
  bool got_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# pano360-manifest", 0) == 0) {
      got_header = true;
      continue;
    }
    if (line[0] == '#') {
      const std::string body = line.substr(2);
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq), val = body.substr(eq + 1);
      if (key == "split_ratio") m.split_ratio = std::stod(val);
      else if (key == "seed") m.seed = std::stoull(val);
      else if (key == "fov_law") m.fov_law = val;
      else if (key == "fill") m.fill = std::stod(val);
      else if (key == "view_size") m.view_size = std::stoi(val);
      else if (key == "warning") m.warnings.push_back(val);
      continue;
    }
    SampleRecord r;
    r.id = token_value(line, "id");
    r.split = token_value(line, "split");
    r.fov_deg = std::stod(token_value(line, "fov_deg"));
    r.src = token_value(line, "src");
    r.view_paths = split4(token_value(line, "views"));
    r.gt_paths = split3(token_value(line, "gt"));
    if (r.split != "train" && r.split != "test")
      throw DataError("manifest: bad split value '" + r.split + "'");
    m.records.push_back(std::move(r));
  }
  if (!got_header) throw DataError("not a dataset manifest: " + path);
  return m;
}

std::vector<const SampleRecord*> DatasetManifest::split_records(const std::string& split) const {
  std::vector<const SampleRecord*> out;
  for (const SampleRecord& r : records)
    if (r.split == split) out.push_back(&r);
  return out;
}

LoadedSample load_sample(const DatasetManifest& m, const SampleRecord& rec) {
  LoadedSample s;
  s.id = rec.id;
  s.fov_deg = rec.fov_deg;
  for (int v = 0; v < 4; ++v)
    s.views[static_cast<std::size_t>(v)] = normalize_image(
        load_image((fs::path(m.base_dir) / rec.view_paths[static_cast<std::size_t>(v)]).string()));
  for (int g = 0; g < 3; ++g)
    s.gt[static_cast<std::size_t>(g)] = normalize_image(
        load_image((fs::path(m.base_dir) / rec.gt_paths[static_cast<std::size_t>(g)]).string()));
  return s;
}

}  // namespace pano360::data
