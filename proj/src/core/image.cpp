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

#include "core/image.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace pano360 {

Image::Image(int height, int width, int channels, ValueRange range, float fill)
    : height_(height), width_(width), channels_(channels), range_(range) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw DataError("image dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

double sample_bilinear(const Image& img, double sx, double sy, int c, bool wrap_x) {
  const int w = img.width();
  const int h = img.height();
  double fx = sx - 0.5;
  double fy = sy - 0.5;
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  double ax = fx - x0;
  double ay = fy - y0;
  int x1 = x0 + 1;
  int y1 = y0 + 1;
  if (wrap_x) {
    x0 = ((x0 % w) + w) % w;
    x1 = ((x1 % w) + w) % w;
  } else {
    x0 = std::clamp(x0, 0, w - 1);
    x1 = std::clamp(x1, 0, w - 1);
  }
  y0 = std::clamp(y0, 0, h - 1);
  y1 = std::clamp(y1, 0, h - 1);
  const double v00 = img.at(y0, x0, c);
  const double v01 = img.at(y0, x1, c);
  const double v10 = img.at(y1, x0, c);
  const double v11 = img.at(y1, x1, c);
  return (1.0 - ay) * ((1.0 - ax) * v00 + ax * v01) + ay * ((1.0 - ax) * v10 + ax * v11);
}

Image resize_bilinear(const Image& img, int out_height, int out_width) {
  Image out(out_height, out_width, img.channels(), img.range());
  const double sx_scale = static_cast<double>(img.width()) / out_width;
  const double sy_scale = static_cast<double>(img.height()) / out_height;
  for (int y = 0; y < out_height; ++y) {
    const double sy = (y + 0.5) * sy_scale;
    for (int x = 0; x < out_width; ++x) {
      const double sx = (x + 0.5) * sx_scale;
      for (int c = 0; c < img.channels(); ++c) {
        out.at(y, x, c) = static_cast<float>(sample_bilinear(img, sx, sy, c, false));
      }
    }
  }
  return out;
}

Image resize_area(const Image& img, int out_height, int out_width) {
  Image out(out_height, out_width, img.channels(), img.range());
  const double sx_scale = static_cast<double>(img.width()) / out_width;
  const double sy_scale = static_cast<double>(img.height()) / out_height;
  const int ch = img.channels();
  std::vector<double> acc(ch);
  for (int y = 0; y < out_height; ++y) {
    const double y_lo = y * sy_scale;
    const double y_hi = (y + 1) * sy_scale;
    const int iy_lo = static_cast<int>(std::floor(y_lo));
    const int iy_hi = std::min(static_cast<int>(std::ceil(y_hi)), img.height());
    for (int x = 0; x < out_width; ++x) {
      const double x_lo = x * sx_scale;
      const double x_hi = (x + 1) * sx_scale;
      const int ix_lo = static_cast<int>(std::floor(x_lo));
      const int ix_hi = std::min(static_cast<int>(std::ceil(x_hi)), img.width());
      std::fill(acc.begin(), acc.end(), 0.0);
      double area = 0.0;
      for (int iy = iy_lo; iy < iy_hi; ++iy) {
        const double wy = std::min<double>(iy + 1, y_hi) - std::max<double>(iy, y_lo);
        for (int ix = ix_lo; ix < ix_hi; ++ix) {
          const double wx = std::min<double>(ix + 1, x_hi) - std::max<double>(ix, x_lo);
          const double w = wx * wy;
          area += w;
          for (int c = 0; c < ch; ++c) acc[c] += w * img.at(iy, ix, c);
        }
      }
      for (int c = 0; c < ch; ++c) out.at(y, x, c) = static_cast<float>(acc[c] / area);
    }
  }
  return out;
}

Image normalize_image(const Image& img_u8) {
  Image out(img_u8.height(), img_u8.width(), img_u8.channels(), ValueRange::normalized);
  const float* src = img_u8.data();
  float* dst = out.data();
  for (std::size_t i = 0; i < img_u8.size(); ++i) {
    dst[i] = static_cast<float>(2.0 * src[i] / 255.0 - 1.0);
  }
  return out;
}

Image denormalize_image(const Image& img_norm) {
  Image out(img_norm.height(), img_norm.width(), img_norm.channels(), ValueRange::u8);
  const float* src = img_norm.data();
  float* dst = out.data();
  for (std::size_t i = 0; i < img_norm.size(); ++i) {
    const double v = (static_cast<double>(src[i]) + 1.0) * 255.0 / 2.0;
    dst[i] = static_cast<float>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

Image to_luminance(const Image& img) {
  if (img.channels() == 1) return img;
  if (img.channels() != 3) throw DataError("luminance conversion expects 1 or 3 channels");
  Image out(img.height(), img.width(), 1, img.range());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(y, x, 0) = static_cast<float>(0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) +
                                           0.114 * img.at(y, x, 2));
    }
  }
  return out;
}

void require_equirect(const Image& img) {
  if (img.empty() || img.width() != 2 * img.height()) {
    throw DataError("equirect panorama must satisfy W = 2H");
  }
}

}  // namespace pano360
