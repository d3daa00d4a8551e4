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

#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace pano360::nn {

// Versioned checkpoint container: a sorted string->string metadata section
// plus sorted named tensor blobs. Sorted maps make byte-identical files for
// identical content; numeric payloads are raw little-endian.
struct CheckpointBlob {
  int dtype = 0;  // 0 = f32, 1 = f64
  std::vector<int> shape;
  std::vector<unsigned char> bytes;

  std::size_t numel() const {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return shape.empty() ? 0 : n;
  }
};

struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::map<std::string, CheckpointBlob> tensors;

  template <typename T>
  void put_tensor(const std::string& name, const std::vector<int>& shape, const T* data) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    CheckpointBlob b;
    b.dtype = sizeof(T) == 4 ? 0 : 1;
    b.shape = shape;
    b.bytes.resize(b.numel() * sizeof(T));
    std::memcpy(b.bytes.data(), data, b.bytes.size());
    tensors[name] = std::move(b);
  }

  template <typename T>
  void get_tensor(const std::string& name, const std::vector<int>& shape, T* out) const {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    auto it = tensors.find(name);
    if (it == tensors.end()) throw DataError("checkpoint missing tensor: " + name);
    const CheckpointBlob& b = it->second;
    if (b.dtype != (sizeof(T) == 4 ? 0 : 1)) throw DataError("checkpoint dtype mismatch: " + name);
    if (b.shape != shape) throw DataError("checkpoint shape mismatch: " + name);
    std::memcpy(out, b.bytes.data(), b.bytes.size());
  }

  bool has_tensor(const std::string& name) const { return tensors.count(name) > 0; }

  const std::string& require_meta(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw DataError("checkpoint missing meta key: " + key);
    return it->second;
  }
};

// Atomic write: serialize to <path>.tmp then rename over path.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pano360::nn
