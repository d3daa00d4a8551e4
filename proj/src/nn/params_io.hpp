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

#include "nn/checkpoint.hpp"
#include "nn/params.hpp"

namespace pano360::nn {

template <typename T>
void params_to_checkpoint(const ParamStore<T>& store, const std::string& prefix,
                          Checkpoint& ckpt) {
  for (const auto& [name, var] : store.all()) {
    if (name.rfind(prefix, 0) != 0) continue;
    ckpt.put_tensor(name, var->value.shape(), var->value.data());
  }
}

// Fills every store parameter under `prefix` from the checkpoint; missing or
// mismatched entries throw.
template <typename T>
void params_from_checkpoint(const Checkpoint& ckpt, const std::string& prefix,
                            ParamStore<T>& store) {
  for (const auto& [name, var] : store.all()) {
    if (name.rfind(prefix, 0) != 0) continue;
    ckpt.get_tensor(name, var->value.shape(), var->value.data());
  }
}

}  // namespace pano360::nn
