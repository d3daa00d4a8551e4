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
#include <utility>

#include "core/image.hpp"

namespace pano360::geometry {

// Unit view direction. The world frame is y-up with z pointing at the north
// view center; azimuth is measured from north, increasing toward west, so the
// west view sits at azimuth +90.
struct Direction {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

Direction normalized(const Direction& d);
double angle_between(const Direction& a, const Direction& b);  // radians

// Equirect parameterization: u = azimuth with the north center at u = 0.5,
// wrapping in [0,1); v = (90 - elevation)/180 so v = 0 is straight up. The
// poles return u = 0 by convention.
std::pair<double, double> dir_to_equirect_uv(const Direction& d);
Direction equirect_uv_to_dir(double u, double v);

// Direction at (azimuth, elevation) in degrees, azimuth west-positive.
Direction dir_from_angles(double azimuth_deg, double elevation_deg);

// Pinhole camera frame: u_axis/v_axis span the image plane in the direction
// of increasing image u (left to right) and v (top to bottom).
struct CameraFrame {
  Direction forward;
  Direction u_axis;
  Direction v_axis;
};

CameraFrame frame_from_yaw_pitch(double yaw_deg, double pitch_deg);

// Cube faces in fixed serialization order. The four side faces carry the
// compass views; each spans a 90-degree square field of view.
enum class FaceKey : int { front_north = 0, left_west, back_south, right_east, up, down };
constexpr int kNumFaces = 6;
const char* face_name(FaceKey key);
CameraFrame face_frame(FaceKey key);

// View ray through image point (u, v) of a square pinhole camera with the
// given field of view, oriented along the face axis. Requires fov in (0,180).
Direction face_uv_to_dir(FaceKey key, double u, double v, double fov_deg);

struct CubeMapFaces {
  int face_size = 0;
  std::array<Image, kNumFaces> faces;
};

CubeMapFaces equirect_to_cubemap(const Image& pano, int face_size);
Image cubemap_to_equirect(const CubeMapFaces& cube, int height);

// Pinhole rendering of the panorama along (yaw, pitch). Rendering the four
// compass poses at fov 90 reproduces the four side cube faces exactly.
// Requires fov in (0,120].
Image render_view(const Image& pano, double yaw_deg, double pitch_deg, double fov_deg,
                  int out_size);

// How an input view scales into a 90-degree cube face: true perspective
// containment (tangent) or the plain angular ratio.
enum class FovScaleLaw { tangent, linear };
FovScaleLaw fov_scale_law_from_string(const std::string& name);
const char* fov_scale_law_name(FovScaleLaw law);

// Side length of the centered block a view with the given fov occupies in a
// face of size S.
int embedded_block_size(double fov_deg, int face_size, FovScaleLaw law);

// Rescales the view into the centered block and fills the border. fov of 90
// fills the whole face, leaving no border. Requires fov in (0,90].
Image embed_view_with_fov(const Image& view, double fov_deg, int face_size, float fill,
                          FovScaleLaw law = FovScaleLaw::tangent);

}  // namespace pano360::geometry
