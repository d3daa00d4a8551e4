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

#include <string>

#include "core/image.hpp"

namespace pano360 {

// Loads an 8-bit PNG or JPEG as RGB (grayscale expands, alpha drops). The
// format is chosen by file signature, not extension. Returns a u8-range image.
Image load_image(const std::string& path);

// Saves as PNG or JPEG depending on the file extension (.png/.jpg/.jpeg).
// Normalized images are denormalized first; 1- and 3-channel supported.
void save_image(const Image& img, const std::string& path);

}  // namespace pano360
