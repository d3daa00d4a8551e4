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

#include "core/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "core/error.hpp"

namespace pano360 {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

Image from_rgb8(const std::vector<unsigned char>& rgb, int h, int w) {
  Image img(h, w, 3, ValueRange::u8);
  for (std::size_t i = 0; i < rgb.size(); ++i) img.data()[i] = rgb[i];
  return img;
}

std::vector<unsigned char> to_u8(const Image& img) {
  const Image u8 = img.range() == ValueRange::normalized ? denormalize_image(img) : img;
  std::vector<unsigned char> out(u8.size());
  for (std::size_t i = 0; i < u8.size(); ++i) {
    out[i] = static_cast<unsigned char>(std::clamp(std::lround(u8.data()[i]), 0L, 255L));
  }
  return out;
}

Image load_png(FILE* f, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png reader init failed: " + path);
  }
  std::vector<unsigned char> rgb;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("corrupt png: " + path);
  }
  png_init_io(png, f);
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  // Normalize every input layout to 8-bit RGB.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  rgb.resize(static_cast<std::size_t>(h) * w * 3);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = rgb.data() + static_cast<std::size_t>(y) * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_rgb8(rgb, static_cast<int>(h), static_cast<int>(w));
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  longjmp(reinterpret_cast<JpegErrorMgr*>(cinfo->err)->jump, 1);
}

Image load_jpeg(FILE* f, const std::string& path) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DataError("corrupt jpeg: " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  std::vector<unsigned char> rgb(static_cast<std::size_t>(h) * w * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    unsigned char* row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_rgb8(rgb, h, w);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char c) { return std::tolower(c); });
  return tail == suffix;
}

void save_png(const Image& img, const std::string& path) {
  const std::vector<unsigned char> bytes = to_u8(img);
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot open for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png writer init failed: " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png write failed: " + path);
  }
  png_init_io(png, f.get());
  const int color = img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, img.width(), img.height(), 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  for (int y = 0; y < img.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_jpeg(const Image& img, const std::string& path) {
  if (img.channels() != 3) throw DataError("jpeg output requires 3 channels: " + path);
  const std::vector<unsigned char> bytes = to_u8(img);
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot open for writing: " + path);
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw DataError("jpeg write failed: " + path);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f.get());
  cinfo.image_width = img.width();
  cinfo.image_height = img.height();
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 95, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(bytes.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

}  // namespace

Image load_image(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open image: " + path);
  unsigned char sig[8] = {};
  const std::size_t got = std::fread(sig, 1, sizeof(sig), f.get());
  std::rewind(f.get());
  if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) return load_png(f.get(), path);
  if (got >= 2 && sig[0] == 0xff && sig[1] == 0xd8) return load_jpeg(f.get(), path);
  throw DataError("unsupported image format (want PNG or JPEG): " + path);
}

void save_image(const Image& img, const std::string& path) {
  if (img.empty()) throw DataError("cannot save empty image: " + path);
  if (ends_with(path, ".png")) {
    save_png(img, path);
  } else if (ends_with(path, ".jpg") || ends_with(path, ".jpeg")) {
    save_jpeg(img, path);
  } else {
    throw DataError("unsupported output extension (want .png/.jpg/.jpeg): " + path);
  }
}

}  // namespace pano360
