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
#include <utility>
#include <vector>

#include "nn/ops.hpp"
#include "nn/params.hpp"

namespace pano360::gan {

// Conditional patch discriminator, one instance per scale with the identical
// architecture: the condition and candidate equirects are channel-concatenated
// (6 input channels), pushed through stride-2 instance-normalized conv blocks,
// and scored by a final 1-channel convolution over patches.
struct DiscriminatorArch {
  std::vector<int> channels = {64, 128, 256, 512};
  bool horizontal_wrap = true;

  // Spatial size of the patch map for an input of the given size.
  std::pair<int, int> patch_shape(int h, int w) const {
    for (std::size_t i = 0; i < channels.size(); ++i) {
      h = (h + 2 - 4) / 2 + 1;
      w = (w + 2 - 4) / 2 + 1;
    }
    return {h, w};  // final conv is 3x3 stride 1 pad 1
  }

  std::string describe() const;
  void require_matches(const std::string& description) const;
  static DiscriminatorArch parse(const std::string& description);
};

template <typename T>
void create_discriminator_params(nn::ParamStore<T>& store, const DiscriminatorArch& arch) {
  int in_ch = 6;
  for (std::size_t i = 0; i < arch.channels.size(); ++i) {
    const std::string c = "disc.c" + std::to_string(i + 1);
    store.create(c + ".w", {arch.channels[i], in_ch, 4, 4});
    store.create(c + ".bias", {arch.channels[i]});
    store.create(c + ".norm.g", {arch.channels[i]});
    store.create(c + ".norm.b", {arch.channels[i]});
    in_ch = arch.channels[i];
  }
  store.create("disc.out.w", {1, in_ch, 3, 3});
  store.create("disc.out.bias", {1});
}

// condition/candidate are {3,H,W} at the scale's resolution; returns the
// {1,N,M} patch logits (no sigmoid; the sigmoid lives in the loss).
template <typename T>
nn::Var<T> discriminator_forward(const DiscriminatorArch& arch, const nn::ParamStore<T>& store,
                                 const nn::Var<T>& condition, const nn::Var<T>& candidate) {
  const auto& cs = condition->value.shape();
  const auto& fs = candidate->value.shape();
  if (cs.size() != 3 || fs.size() != 3 || cs != fs)
    throw DataError("discriminator_forward: condition/candidate resolution mismatch");
  nn::Var<T> x = nn::concat_ch(condition, candidate);
  for (std::size_t i = 0; i < arch.channels.size(); ++i) {
    const std::string c = "disc.c" + std::to_string(i + 1);
    nn::Conv2dSpec spec{2, 1, arch.horizontal_wrap};
    x = nn::conv2d(x, store.get(c + ".w"), store.get(c + ".bias"), spec);
    x = nn::instance_norm(x, store.get(c + ".norm.g"), store.get(c + ".norm.b"));
    x = nn::leaky_relu(x, T(0.2));
  }
  nn::Conv2dSpec spec{1, 1, arch.horizontal_wrap};
  return nn::conv2d(x, store.get("disc.out.w"), store.get("disc.out.bias"), spec);
}

// Eq-(1)-style patch losses with mean reduction, in -log sigmoid form:
// d = -mean log s(real) - mean log(1 - s(fake)); the generator uses the
// non-saturating form g = -mean log s(fake).
template <typename T>
nn::Var<T> discriminator_loss(const nn::Var<T>& real_patch, const nn::Var<T>& fake_patch) {
  nn::require_same_shape(real_patch->value.shape(), fake_patch->value.shape(),
                         "discriminator_loss");
  return nn::add(nn::mean_softplus(real_patch, T(-1)), nn::mean_softplus(fake_patch, T(1)));
}

template <typename T>
nn::Var<T> generator_adv_loss(const nn::Var<T>& fake_patch) {
  return nn::mean_softplus(fake_patch, T(-1));
}

}  // namespace pano360::gan
