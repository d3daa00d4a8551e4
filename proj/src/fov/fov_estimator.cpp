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

#include "fov/fov_estimator.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/error.hpp"
#include "core/strings.hpp"

namespace pano360::fov {

int FovClassSpec::class_of(double fov_deg) const {
  validate();
  int best = 0;
  double best_d = std::abs(fov_deg - bin_centers[0]);
  for (int i = 1; i < n_classes(); ++i) {
    const double d = std::abs(fov_deg - bin_centers[static_cast<std::size_t>(i)]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double FovClassSpec::center_of(int cls) const {
  if (cls < 0 || cls >= n_classes()) throw DataError("fov class index out of range");
  return bin_centers[static_cast<std::size_t>(cls)];
}

void FovClassSpec::validate() const {
  if (bin_centers.empty()) throw DataError("fov bins must be non-empty");
  for (std::size_t i = 0; i < bin_centers.size(); ++i) {
    if (bin_centers[i] <= 0.0 || bin_centers[i] > 90.0)
      throw DataError("fov bin centers must lie in (0,90]");
    if (i > 0 && bin_centers[i] <= bin_centers[i - 1])
      throw DataError("fov bin centers must be strictly increasing");
  }
}

std::string FovClassSpec::describe() const {
  std::ostringstream os;
  char buf[32];
  for (std::size_t i = 0; i < bin_centers.size(); ++i) {
    if (i) os << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", bin_centers[i]);
    os << buf;
  }
  return os.str();
}

FovClassSpec FovClassSpec::parse(const std::string& description) {
  FovClassSpec spec;
  spec.bin_centers.clear();
  for (const std::string& tok : split(description, ',')) {
    try {
      spec.bin_centers.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw DataError("malformed fov bin list: " + description);
    }
  }
  spec.validate();
  return spec;
}

std::string FovNetArch::describe() const {
  std::ostringstream os;
  os << "ch=";
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (i) os << ",";
    os << channels[i];
  }
  os << ";resize=" << input_resize;
  return os.str();
}

void FovNetArch::require_matches(const std::string& description) const {
  if (describe() != description) {
    throw DataError("fov net architecture mismatch: checkpoint has '" + description +
                    "', runtime expects '" + describe() + "'");
  }
}

FovNetArch FovNetArch::parse(const std::string& description) {
  FovNetArch arch;
  const auto kv = parse_kv(description);
  for (const auto& [key, val] : kv) {
    if (key == "ch") arch.channels = parse_ints(val);
    else if (key == "resize") arch.input_resize = parse_ints(val).at(0);
    else throw DataError("fov net description has unknown field: " + key);
  }
  arch.require_matches(description);
  return arch;
}

nn::Tensor<float> views_to_tensor(const std::array<Image, 4>& views, int resize) {
  for (const Image& v : views) {
    if (v.empty() || v.channels() != 3 || v.width() != v.height())
      throw DataError("fov input views must be square RGB");
    if (v.width() != views[0].width()) throw DataError("fov input views must share one size");
  }
  nn::Tensor<float> t({12, resize, resize});
  for (int k = 0; k < 4; ++k) {
    const Image r = views[static_cast<std::size_t>(k)].width() == resize
                        ? views[static_cast<std::size_t>(k)]
                        : resize_area(views[static_cast<std::size_t>(k)], resize, resize);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < resize; ++y)
        for (int x = 0; x < resize; ++x)
          t[(static_cast<std::size_t>(k * 3 + c) * resize + y) * resize + x] = r.at(y, x, c);
  }
  return t;
}

FovPrediction predict_from_logits(const FovClassSpec& spec, const std::vector<double>& logits) {
  if (static_cast<int>(logits.size()) != spec.n_classes())
    throw DataError("logit count does not match fov class count");
  FovPrediction p;
  p.logits = logits;
  p.predicted_class = 0;
  for (int i = 1; i < spec.n_classes(); ++i) {
    if (logits[static_cast<std::size_t>(i)] > logits[static_cast<std::size_t>(p.predicted_class)])
      p.predicted_class = i;
  }
  p.predicted_fov = spec.center_of(p.predicted_class);
  return p;
}

FovPrediction fov_predict(const FovNetArch& arch, const FovClassSpec& spec,
                          const nn::ParamStore<float>& store, const std::array<Image, 4>& views) {
  const nn::Tensor<float> input = views_to_tensor(views, arch.input_resize);
  const auto logits = fov_forward_logits(arch, store, input);
  std::vector<double> vals(logits->value.numel());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = logits->value[i];
  return predict_from_logits(spec, vals);
}

Image constrain_views(const std::array<Image, 4>& views, double fov_deg, int face_size,
                      float fill, int out_height, geometry::FovScaleLaw law) {
  geometry::CubeMapFaces cube;
  cube.face_size = face_size;
  for (int k = 0; k < 4; ++k) {
    const Image& v = views[static_cast<std::size_t>(k)];
    if (v.empty() || v.width() != v.height()) throw DataError("constrain_views: views must be square");
    cube.faces[static_cast<std::size_t>(k)] =
        geometry::embed_view_with_fov(v, fov_deg, face_size, fill, law);
  }
  const Image blank(face_size, face_size, views[0].channels(), views[0].range(), fill);
  cube.faces[static_cast<int>(geometry::FaceKey::up)] = blank;
  cube.faces[static_cast<int>(geometry::FaceKey::down)] = blank;
  return geometry::cubemap_to_equirect(cube, out_height);
}

}  // namespace pano360::fov
