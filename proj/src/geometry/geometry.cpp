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

#include "geometry/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace pano360::geometry {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

Direction cross(const Direction& a, const Direction& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Direction& a, const Direction& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

}  // namespace

Direction normalized(const Direction& d) {
  const double n = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  if (n == 0.0) throw DataError("cannot normalize zero direction");
  return {d.x / n, d.y / n, d.z / n};
}

double angle_between(const Direction& a, const Direction& b) {
  return std::acos(std::clamp(dot(normalized(a), normalized(b)), -1.0, 1.0));
}

Direction dir_from_angles(double azimuth_deg, double elevation_deg) {
  const double az = azimuth_deg * kDegToRad;
  const double el = elevation_deg * kDegToRad;
  const double ce = std::cos(el);
  return {-ce * std::sin(az), std::sin(el), ce * std::cos(az)};
}

std::pair<double, double> dir_to_equirect_uv(const Direction& d) {
  const double y = std::clamp(d.y, -1.0, 1.0);
  const double v = (M_PI / 2.0 - std::asin(y)) / M_PI;
  if (d.x == 0.0 && d.z == 0.0) return {0.0, v};  // pole convention
  const double az = std::atan2(-d.x, d.z);  // west-positive
  double u = 0.5 + az / (2.0 * M_PI);
  u -= std::floor(u);
  if (u >= 1.0) u = 0.0;
  return {u, v};
}

Direction equirect_uv_to_dir(double u, double v) {
  return dir_from_angles((u - 0.5) * 360.0, 90.0 - v * 180.0);
}

CameraFrame frame_from_yaw_pitch(double yaw_deg, double pitch_deg) {
  CameraFrame f;
  f.forward = dir_from_angles(yaw_deg, pitch_deg);
  f.u_axis = dir_from_angles(yaw_deg + 90.0, 0.0);
  f.v_axis = cross(f.forward, f.u_axis);
  return f;
}

const char* face_name(FaceKey key) {
  switch (key) {
    case FaceKey::front_north: return "north";
    case FaceKey::left_west: return "west";
    case FaceKey::back_south: return "south";
    case FaceKey::right_east: return "east";
    case FaceKey::up: return "up";
    case FaceKey::down: return "down";
  }
  throw DataError("invalid face key");
}

CameraFrame face_frame(FaceKey key) {
  switch (key) {
    case FaceKey::front_north: return frame_from_yaw_pitch(0.0, 0.0);
    case FaceKey::left_west: return frame_from_yaw_pitch(90.0, 0.0);
    case FaceKey::back_south: return frame_from_yaw_pitch(180.0, 0.0);
    case FaceKey::right_east: return frame_from_yaw_pitch(270.0, 0.0);
    case FaceKey::up: return frame_from_yaw_pitch(0.0, 90.0);
    case FaceKey::down: return frame_from_yaw_pitch(0.0, -90.0);
  }
  throw DataError("invalid face key");
}

Direction face_uv_to_dir(FaceKey key, double u, double v, double fov_deg) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw DataError("face fov must lie in (0, 180) degrees");
  }
  const CameraFrame f = face_frame(key);
  const double t = std::tan(fov_deg * 0.5 * kDegToRad);
  const double a = (2.0 * u - 1.0) * t;
  const double b = (2.0 * v - 1.0) * t;
  return normalized({f.forward.x + a * f.u_axis.x + b * f.v_axis.x,
                     f.forward.y + a * f.u_axis.y + b * f.v_axis.y,
                     f.forward.z + a * f.u_axis.z + b * f.v_axis.z});
}

namespace {

// Shared pinhole rasterizer; equirect_to_cubemap and render_view go through
// this one path so the compass renders and the side faces are bit-identical.
Image render_frame(const Image& pano, const CameraFrame& frame, double fov_deg, int out_size) {
  require_equirect(pano);
  Image out(out_size, out_size, pano.channels(), pano.range());
  const double t = std::tan(fov_deg * 0.5 * kDegToRad);
  const int ch = pano.channels();
  for (int y = 0; y < out_size; ++y) {
    const double b = (2.0 * (y + 0.5) / out_size - 1.0) * t;
    for (int x = 0; x < out_size; ++x) {
      const double a = (2.0 * (x + 0.5) / out_size - 1.0) * t;
      const Direction d = normalized({frame.forward.x + a * frame.u_axis.x + b * frame.v_axis.x,
                                      frame.forward.y + a * frame.u_axis.y + b * frame.v_axis.y,
                                      frame.forward.z + a * frame.u_axis.z + b * frame.v_axis.z});
      const auto [u, v] = dir_to_equirect_uv(d);
      const double sx = u * pano.width();
      const double sy = v * pano.height();
      for (int c = 0; c < ch; ++c) {
        out.at(y, x, c) = static_cast<float>(sample_bilinear(pano, sx, sy, c, true));
      }
    }
  }
  return out;
}

}  // namespace

CubeMapFaces equirect_to_cubemap(const Image& pano, int face_size) {
  require_equirect(pano);
  if (face_size < 2) throw DataError("face size must be >= 2");
  CubeMapFaces cube;
  cube.face_size = face_size;
  for (int i = 0; i < kNumFaces; ++i) {
    cube.faces[i] = render_frame(pano, face_frame(static_cast<FaceKey>(i)), 90.0, face_size);
  }
  return cube;
}

Image cubemap_to_equirect(const CubeMapFaces& cube, int height) {
  if (height < 2) throw DataError("output height must be >= 2");
  for (const Image& f : cube.faces) {
    if (f.empty() || f.width() != cube.face_size || f.height() != cube.face_size) {
      throw DataError("cubemap faces must be square and share face_size");
    }
  }
  const int width = 2 * height;
  const int ch = cube.faces[0].channels();
  Image out(height, width, ch, cube.faces[0].range());
  // One frame fetch per face, reused for every pixel.
  std::array<CameraFrame, kNumFaces> frames;
  for (int i = 0; i < kNumFaces; ++i) frames[i] = face_frame(static_cast<FaceKey>(i));
  for (int y = 0; y < height; ++y) {
    const double v = (y + 0.5) / height;
    for (int x = 0; x < width; ++x) {
      const double u = (x + 0.5) / width;
      const Direction d = equirect_uv_to_dir(u, v);
      // Select the face whose axis dominates; ties resolve z, then x, then y.
      const double ax = std::fabs(d.x), ay = std::fabs(d.y), az = std::fabs(d.z);
      FaceKey key;
      if (az >= ax && az >= ay) {
        key = d.z >= 0.0 ? FaceKey::front_north : FaceKey::back_south;
      } else if (ax >= ay) {
        key = d.x >= 0.0 ? FaceKey::right_east : FaceKey::left_west;
      } else {
        key = d.y >= 0.0 ? FaceKey::up : FaceKey::down;
      }
      const CameraFrame& f = frames[static_cast<int>(key)];
      const double depth = dot(d, f.forward);
      const double fu = (dot(d, f.u_axis) / depth + 1.0) * 0.5;
      const double fv = (dot(d, f.v_axis) / depth + 1.0) * 0.5;
      const Image& face = cube.faces[static_cast<int>(key)];
      const double sx = fu * cube.face_size;
      const double sy = fv * cube.face_size;
      for (int c = 0; c < ch; ++c) {
        out.at(y, x, c) = static_cast<float>(sample_bilinear(face, sx, sy, c, false));
      }
    }
  }
  return out;
}

Image render_view(const Image& pano, double yaw_deg, double pitch_deg, double fov_deg,
                  int out_size) {
  if (!(fov_deg > 0.0 && fov_deg <= 120.0)) {
    throw DataError("render fov must lie in (0, 120] degrees");
  }
  if (out_size < 1) throw DataError("view size must be >= 1");
  return render_frame(pano, frame_from_yaw_pitch(yaw_deg, pitch_deg), fov_deg, out_size);
}

FovScaleLaw fov_scale_law_from_string(const std::string& name) {
  if (name == "tangent") return FovScaleLaw::tangent;
  if (name == "linear") return FovScaleLaw::linear;
  throw DataError("unknown fov scale law: " + name);
}

const char* fov_scale_law_name(FovScaleLaw law) {
  return law == FovScaleLaw::tangent ? "tangent" : "linear";
}

int embedded_block_size(double fov_deg, int face_size, FovScaleLaw law) {
  if (!(fov_deg > 0.0 && fov_deg <= 90.0)) {
    throw DataError("embed fov must lie in (0, 90] degrees");
  }
  double ratio;
  if (law == FovScaleLaw::tangent) {
    ratio = std::tan(fov_deg * 0.5 * kDegToRad) / std::tan(45.0 * kDegToRad);
  } else {
    ratio = fov_deg / 90.0;
  }
  return static_cast<int>(std::lround(face_size * ratio));
}

Image embed_view_with_fov(const Image& view, double fov_deg, int face_size, float fill,
                          FovScaleLaw law) {
  if (view.empty() || view.width() != view.height()) {
    throw DataError("view to embed must be square");
  }
  if (face_size < 2) throw DataError("face size must be >= 2");
  const int block = embedded_block_size(fov_deg, face_size, law);
  Image out(face_size, face_size, view.channels(), view.range(), fill);
  const Image scaled = (block == view.width()) ? view : resize_bilinear(view, block, block);
  const int offset = (face_size - block) / 2;
  for (int y = 0; y < block; ++y) {
    for (int x = 0; x < block; ++x) {
      for (int c = 0; c < view.channels(); ++c) {
        out.at(offset + y, offset + x, c) = scaled.at(y, x, c);
      }
    }
  }
  return out;
}

}  // namespace pano360::geometry
