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
#include <vector>

namespace pano360 {

// Value range carried by an image. u8 images hold [0,255] (stored as float),
// normalized images hold [-1,1].
enum class ValueRange { u8, normalized };

// Row-major H x W x C float image. All pipeline images are either 3-channel
// RGB or single-channel.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, ValueRange range, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  ValueRange range() const { return range_; }
  void set_range(ValueRange r) { range_ = r; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  float& at(int y, int x, int c) { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }
  float at(int y, int x, int c) const { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }
  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  ValueRange range_ = ValueRange::u8;
  std::vector<float> data_;
};

// Bilinear sample at continuous pixel coordinates (sx, sy) where pixel (i, j)
// is centered at (j + 0.5, i + 0.5). Horizontal wrap treats the image as
// periodic in x (equirect azimuth); y always clamps.
double sample_bilinear(const Image& img, double sx, double sy, int c, bool wrap_x);

Image resize_bilinear(const Image& img, int out_height, int out_width);

// Box-filter (area-weighted) resize; exact average for integer factors.
Image resize_area(const Image& img, int out_height, int out_width);

// Affine [0,255] -> [-1,1]: 0 maps to -1 and 255 to 1.
Image normalize_image(const Image& img_u8);

// Inverse of normalize_image; rounds to integral u8 levels.
Image denormalize_image(const Image& img_norm);

// Converts RGB to luminance with weights 0.299/0.587/0.114. Single-channel
// input is passed through.
Image to_luminance(const Image& img);

void require_equirect(const Image& img);  // W == 2H, throws DataError

}  // namespace pano360
