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

#include "core/image.hpp"
#include "nn/tensor.hpp"

namespace pano360::nn {

// HWC image -> CHW tensor. Images feeding the networks must be normalized.
template <typename T = float>
Tensor<T> tensor_from_image(const Image& img) {
  Tensor<T> t({img.channels(), img.height(), img.width()});
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        t[(static_cast<std::size_t>(c) * img.height() + y) * img.width() + x] =
            static_cast<T>(img.at(y, x, c));
  return t;
}

template <typename T = float>
Image image_from_tensor(const Tensor<T>& t, ValueRange range = ValueRange::normalized) {
  if (t.ndim() != 3) throw DataError("image_from_tensor: rank must be 3");
  Image img(t.dim(1), t.dim(2), t.dim(0), range);
  for (int c = 0; c < t.dim(0); ++c)
    for (int y = 0; y < t.dim(1); ++y)
      for (int x = 0; x < t.dim(2); ++x)
        img.at(y, x, c) = static_cast<float>(
            t[(static_cast<std::size_t>(c) * t.dim(1) + y) * t.dim(2) + x]);
  return img;
}

}  // namespace pano360::nn
