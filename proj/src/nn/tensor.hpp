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

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace pano360::nn {

// Dense row-major tensor. Feature maps are {C,H,W} (batch size is 1 across
// the whole pipeline), vectors are {N}, scalars are {1}.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, T fill = T(0)) : shape_(std::move(shape)) {
    data_.assign(numel_of(shape_), fill);
  }

  static std::size_t numel_of(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw DataError("tensor dims must be positive");
      n *= static_cast<std::size_t>(d);
    }
    return shape.empty() ? 0 : n;
  }

  const std::vector<int>& shape() const { return shape_; }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  int ndim() const { return static_cast<int>(shape_.size()); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  void release() {
    data_.clear();
    data_.shrink_to_fit();
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

inline std::string shape_str(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

inline void require_same_shape(const std::vector<int>& a, const std::vector<int>& b,
                               const char* what) {
  if (a != b) {
    throw DataError(std::string(what) + ": shape mismatch " + shape_str(a) + " vs " +
                    shape_str(b));
  }
}

}  // namespace pano360::nn
