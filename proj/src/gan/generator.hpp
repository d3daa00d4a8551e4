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

#include "nn/ops.hpp"
#include "nn/params.hpp"

namespace pano360::gan {

enum class Stage : int { small = 0, medium = 1, large = 2 };

Stage stage_from_string(const std::string& name);
const char* stage_name(Stage s);
const char* stage_suffix(Stage s);  // "s", "m", "l"
int stage_height(Stage s);          // 128 / 256 / 512; width is always 2x

// The unified generator: per-stage 3<->64 channel bridges around a U-Net core
// at the small scale and residual-block cores at medium/large. Outputs
// compose residually across scales through fixed bilinear x2 upsampling and
// are bounded to [-1,1] after each composition.
struct GeneratorArch {
  int bridge_channels = 64;
  std::vector<int> enc_channels = {64, 128, 192, 256};  // small-core encoder widths
  int res_blocks = 3;                                   // medium/large core depth
  bool skip_connections = true;
  bool horizontal_wrap = true;  // azimuth-periodic convolution padding

  std::string describe() const;
  void require_matches(const std::string& description) const;
  static GeneratorArch parse(const std::string& description);
};

// Parameter-group prefixes owned by one stage, in creation/init order.
std::vector<std::string> generator_group_prefixes(Stage stage);

template <typename T>
void create_generator_stage_params(nn::ParamStore<T>& store, const GeneratorArch& arch,
                                   Stage stage);

template <typename T>
struct GeneratorOutputs {
  std::array<nn::Var<T>, 3> scale;  // filled up to the active stage

  const nn::Var<T>& at(Stage s) const { return scale[static_cast<int>(s)]; }
};

// Runs the hierarchy up to `stage`. inputs[i] is the FOV-constrained equirect
// at scale i, {3,H,2H} with each level exactly doubling the one below; levels
// above `stage` are ignored. The small level must be at least 16 rows so the
// encoder can downsample four times.
template <typename T>
GeneratorOutputs<T> generator_forward(const GeneratorArch& arch, const nn::ParamStore<T>& store,
                                      Stage stage, const std::vector<nn::Tensor<T>>& inputs);

// Single-image pass through one stage's bridges + core with no residual
// composition; used by the cubemap-format seam demonstration.
template <typename T>
nn::Var<T> generator_single_scale(const GeneratorArch& arch, const nn::ParamStore<T>& store,
                                  Stage stage, const nn::Tensor<T>& input);

// ---- implementation ----

namespace detail {

template <typename T>
nn::Var<T> conv_block(const nn::ParamStore<T>& store, const std::string& prefix,
                      const nn::Var<T>& x, int stride, int pad, bool wrap, bool norm_act) {
  nn::Conv2dSpec spec{stride, pad, wrap};
  auto y = nn::conv2d(x, store.get(prefix + ".w"), store.get(prefix + ".bias"), spec);
  if (norm_act) {
    y = nn::instance_norm(y, store.get(prefix + ".norm.g"), store.get(prefix + ".norm.b"));
    y = nn::leaky_relu(y, T(0.2));
  }
  return y;
}

template <typename T>
nn::Var<T> small_core(const GeneratorArch& arch, const nn::ParamStore<T>& store,
                      const std::string& core, const nn::Var<T>& feat) {
  const bool wrap = arch.horizontal_wrap;
  std::vector<nn::Var<T>> skips;
  skips.push_back(feat);
  nn::Var<T> x = feat;
  const int levels = static_cast<int>(arch.enc_channels.size());
  for (int i = 0; i < levels; ++i) {
    x = conv_block(store, core + ".d" + std::to_string(i + 1), x, 2, 1, wrap, true);
    if (i + 1 < levels) skips.push_back(x);
  }
  x = conv_block(store, core + ".bott", x, 1, 1, wrap, true);
  for (int i = levels - 1; i >= 0; --i) {
    x = nn::upsample2x(x, nn::UpsampleMode::nearest, wrap);
    if (arch.skip_connections) x = nn::concat_ch(x, skips[static_cast<std::size_t>(i)]);
    x = conv_block(store, core + ".u" + std::to_string(i), x, 1, 1, wrap, true);
  }
  return x;
}

template <typename T>
nn::Var<T> res_core(const GeneratorArch& arch, const nn::ParamStore<T>& store,
                    const std::string& core, const nn::Var<T>& feat) {
  const bool wrap = arch.horizontal_wrap;
  nn::Var<T> x = feat;
  for (int i = 0; i < arch.res_blocks; ++i) {
    const std::string rb = core + ".rb" + std::to_string(i);
    nn::Conv2dSpec spec{1, 1, wrap};
    auto y = nn::conv2d(x, store.get(rb + ".conv1.w"), store.get(rb + ".conv1.bias"), spec);
    y = nn::instance_norm(y, store.get(rb + ".norm1.g"), store.get(rb + ".norm1.b"));
    y = nn::leaky_relu(y, T(0.2));
    y = nn::conv2d(y, store.get(rb + ".conv2.w"), store.get(rb + ".conv2.bias"), spec);
    y = nn::instance_norm(y, store.get(rb + ".norm2.g"), store.get(rb + ".norm2.b"));
    x = nn::add(x, y);
  }
  return x;
}

// Bridges carry no normalization or activation.
template <typename T>
nn::Var<T> stage_raw_output(const GeneratorArch& arch, const nn::ParamStore<T>& store, Stage stage,
                            const nn::Tensor<T>& input) {
  const std::string sfx = stage_suffix(stage);
  auto x = nn::make_constant(nn::Tensor<T>(input));
  auto feat = conv_block(store, "gen.in_bridge_" + sfx, x, 1, 1, arch.horizontal_wrap, false);
  nn::Var<T> core = stage == Stage::small ? small_core(arch, store, "gen.core_" + sfx, feat)
                                          : res_core(arch, store, "gen.core_" + sfx, feat);
  return conv_block(store, "gen.out_bridge_" + sfx, core, 1, 1, arch.horizontal_wrap, false);
}

template <typename T>
void require_level_shape(const nn::Tensor<T>& t, int level, int base_h, int base_w) {
  const int h = base_h << level, w = base_w << level;
  if (t.ndim() != 3 || t.dim(0) != 3 || t.dim(1) != h || t.dim(2) != w)
    throw DataError("generator input at level " + std::to_string(level) + " must be {3," +
                    std::to_string(h) + "," + std::to_string(w) + "}, got " +
                    nn::shape_str(t.shape()));
}

}  // namespace detail

template <typename T>
void create_generator_stage_params(nn::ParamStore<T>& store, const GeneratorArch& arch,
                                   Stage stage) {
  const std::string sfx = stage_suffix(stage);
  const int bc = arch.bridge_channels;
  store.create("gen.in_bridge_" + sfx + ".w", {bc, 3, 3, 3});
  store.create("gen.in_bridge_" + sfx + ".bias", {bc});
  store.create("gen.out_bridge_" + sfx + ".w", {3, bc, 3, 3});
  store.create("gen.out_bridge_" + sfx + ".bias", {3});
  const std::string core = "gen.core_" + sfx;
  if (stage == Stage::small) {
    const auto& enc = arch.enc_channels;
    int in_ch = bc;
    for (std::size_t i = 0; i < enc.size(); ++i) {
      const std::string d = core + ".d" + std::to_string(i + 1);
      store.create(d + ".w", {enc[i], in_ch, 4, 4});
      store.create(d + ".bias", {enc[i]});
      store.create(d + ".norm.g", {enc[i]});
      store.create(d + ".norm.b", {enc[i]});
      in_ch = enc[i];
    }
    store.create(core + ".bott.w", {in_ch, in_ch, 3, 3});
    store.create(core + ".bott.bias", {in_ch});
    store.create(core + ".bott.norm.g", {in_ch});
    store.create(core + ".bott.norm.b", {in_ch});
    // Decoder level i consumes the upsampled features (+ skip) and emits the
    // width of encoder level i-1 (the bridge width at the top).
    for (int i = static_cast<int>(enc.size()) - 1; i >= 0; --i) {
      const int skip_ch = i == 0 ? bc : enc[static_cast<std::size_t>(i - 1)];
      const int up_ch = i == static_cast<int>(enc.size()) - 1
                            ? enc.back()
                            : enc[static_cast<std::size_t>(i)];
      const int in_c = arch.skip_connections ? up_ch + skip_ch : up_ch;
      const int out_c = skip_ch;
      const std::string u = core + ".u" + std::to_string(i);
      store.create(u + ".w", {out_c, in_c, 3, 3});
      store.create(u + ".bias", {out_c});
      store.create(u + ".norm.g", {out_c});
      store.create(u + ".norm.b", {out_c});
    }
  } else {
    for (int i = 0; i < arch.res_blocks; ++i) {
      const std::string rb = core + ".rb" + std::to_string(i);
      for (const char* conv : {"conv1", "conv2"}) {
        store.create(rb + "." + conv + ".w", {bc, bc, 3, 3});
        store.create(rb + "." + conv + ".bias", {bc});
      }
      for (const char* norm : {"norm1", "norm2"}) {
        store.create(rb + "." + norm + ".g", {bc});
        store.create(rb + "." + norm + ".b", {bc});
      }
    }
  }
}

template <typename T>
GeneratorOutputs<T> generator_forward(const GeneratorArch& arch, const nn::ParamStore<T>& store,
                                      Stage stage, const std::vector<nn::Tensor<T>>& inputs) {
  const int n_levels = static_cast<int>(stage) + 1;
  if (static_cast<int>(inputs.size()) < n_levels)
    throw DataError("generator_forward: not enough input levels for stage");
  const int base_h = inputs[0].ndim() == 3 ? inputs[0].dim(1) : 0;
  const int base_w = inputs[0].ndim() == 3 ? inputs[0].dim(2) : 0;
  if (base_h < 16 || base_h % 16 != 0 || base_w % 16 != 0)
    throw DataError("generator_forward: small level must be a multiple of 16 rows/cols");
  for (int i = 0; i < n_levels; ++i) detail::require_level_shape(inputs[i], i, base_h, base_w);

  GeneratorOutputs<T> out;
  nn::Var<T> prev;
  for (int i = 0; i < n_levels; ++i) {
    const Stage s = static_cast<Stage>(i);
    auto raw = detail::stage_raw_output(arch, store, s, inputs[static_cast<std::size_t>(i)]);
    if (i > 0) {
      auto up = nn::upsample2x(prev, nn::UpsampleMode::bilinear, arch.horizontal_wrap);
      raw = nn::add(raw, up);
    }
    prev = nn::clamp_unit(raw);
    out.scale[static_cast<std::size_t>(i)] = prev;
  }
  return out;
}

template <typename T>
nn::Var<T> generator_single_scale(const GeneratorArch& arch, const nn::ParamStore<T>& store,
                                  Stage stage, const nn::Tensor<T>& input) {
  if (input.ndim() != 3 || input.dim(0) != 3)
    throw DataError("generator_single_scale: input must be {3,H,W}");
  if (stage == Stage::small && (input.dim(1) % 16 != 0 || input.dim(2) % 16 != 0))
    throw DataError("generator_single_scale: dims must be multiples of 16");
  return nn::clamp_unit(detail::stage_raw_output(arch, store, stage, input));
}

}  // namespace pano360::gan
