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
#include <string>
#include <vector>

#include "core/image.hpp"
#include "geometry/geometry.hpp"
#include "nn/ops.hpp"
#include "nn/params.hpp"

namespace pano360::fov {

// The classifier's FOV bins. Default: 5-degree bins over the generation range.
struct FovClassSpec {
  std::vector<double> bin_centers = {45, 50, 55, 60, 65, 70, 75};

  int n_classes() const { return static_cast<int>(bin_centers.size()); }
  int class_of(double fov_deg) const;       // nearest bin center
  double center_of(int cls) const;          // throws on bad index
  double snap(double fov_deg) const { return center_of(class_of(fov_deg)); }
  void validate() const;                    // strictly increasing, within (0,90]

  std::string describe() const;             // comma-joined centers
  static FovClassSpec parse(const std::string& description);
};

struct FovPrediction {
  std::vector<double> logits;
  int predicted_class = 0;
  double predicted_fov = 0.0;
};

// Classifier over the channel-concatenated view set: stride-2 conv blocks with
// leaky ReLU, global average pooling, and a linear head to N logits.
struct FovNetArch {
  std::vector<int> channels = {32, 64, 128, 256, 256};
  int input_resize = 128;  // views are box-resampled to this square size

  std::string describe() const;
  void require_matches(const std::string& description) const;
  static FovNetArch parse(const std::string& description);
};

template <typename T>
void create_fov_params(nn::ParamStore<T>& store, const FovNetArch& arch, int n_classes) {
  int in_ch = 12;
  for (std::size_t i = 0; i < arch.channels.size(); ++i) {
    const std::string c = "fov.c" + std::to_string(i + 1);
    store.create(c + ".w", {arch.channels[i], in_ch, 4, 4});
    store.create(c + ".bias", {arch.channels[i]});
    in_ch = arch.channels[i];
  }
  store.create("fov.head.w", {n_classes, in_ch});
  store.create("fov.head.bias", {n_classes});
}

// views12 is the {12, R, R} stack of the four views in [north, west, south,
// east] order (order is semantic).
template <typename T>
nn::Var<T> fov_forward_logits(const FovNetArch& arch, const nn::ParamStore<T>& store,
                              const nn::Tensor<T>& views12) {
  if (views12.ndim() != 3 || views12.dim(0) != 12)
    throw DataError("fov_forward_logits: input must be {12,R,R}");
  nn::Var<T> x = nn::make_constant(nn::Tensor<T>(views12));
  for (std::size_t i = 0; i < arch.channels.size(); ++i) {
    const std::string c = "fov.c" + std::to_string(i + 1);
    nn::Conv2dSpec spec{2, 1, false};
    x = nn::conv2d(x, store.get(c + ".w"), store.get(c + ".bias"), spec);
    x = nn::leaky_relu(x, T(0.2));
  }
  x = nn::global_avg_pool(x);
  return nn::linear(x, store.get("fov.head.w"), store.get("fov.head.bias"));
}

// Softmax cross-entropy between the logit vector and the label bin.
template <typename T>
nn::Var<T> fov_loss(const nn::Var<T>& logits, int label_class) {
  return nn::softmax_cross_entropy(logits, label_class);
}

// Stacks the four views into the {12,R,R} classifier input (box-resampled).
nn::Tensor<float> views_to_tensor(const std::array<Image, 4>& views, int resize);

// Argmax prediction (lowest index wins ties).
FovPrediction predict_from_logits(const FovClassSpec& spec, const std::vector<double>& logits);

FovPrediction fov_predict(const FovNetArch& arch, const FovClassSpec& spec,
                          const nn::ParamStore<float>& store, const std::array<Image, 4>& views);

// The FOV-constrained equirect input: each view embedded into its compass
// cube face at the given fov, up/down faces filled, warped to an equirect of
// the requested height. Views must be normalized [-1,1].
Image constrain_views(const std::array<Image, 4>& views, double fov_deg, int face_size,
                      float fill, int out_height,
                      geometry::FovScaleLaw law = geometry::FovScaleLaw::tangent);

}  // namespace pano360::fov
