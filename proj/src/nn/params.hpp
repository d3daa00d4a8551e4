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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "nn/graph.hpp"

namespace pano360::nn {

// Long-lived named parameter leaves. Keys are sorted, so every whole-store
// walk (init, update, serialization) is order-deterministic.
template <typename T>
class ParamStore {
 public:
  Var<T> create(const std::string& name, const std::vector<int>& shape) {
    if (params_.count(name)) throw DataError("parameter already exists: " + name);
    auto v = make_leaf(Tensor<T>(shape), true);
    params_.emplace(name, v);
    return v;
  }

  Var<T> get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw DataError("missing parameter: " + name);
    return it->second;
  }

  bool has(const std::string& name) const { return params_.count(name) > 0; }
  std::size_t size() const { return params_.size(); }

  const std::map<std::string, Var<T>>& all() const { return params_; }

  std::vector<std::pair<std::string, Var<T>>> with_prefix(const std::string& prefix) const {
    std::vector<std::pair<std::string, Var<T>>> out;
    for (const auto& [k, v] : params_) {
      if (k.rfind(prefix, 0) == 0) out.emplace_back(k, v);
    }
    return out;
  }

  void set_requires_grad(const std::string& prefix, bool flag) {
    for (auto& [k, v] : params_) {
      if (k.rfind(prefix, 0) == 0) v->requires_grad = flag;
    }
  }

  void zero_grads() {
    for (auto& [k, v] : params_) v->grad.release();
  }

  std::size_t total_parameters() const {
    std::size_t n = 0;
    for (const auto& [k, v] : params_) n += v->value.numel();
    return n;
  }

 private:
  std::map<std::string, Var<T>> params_;
};

// He-style fan-in init for conv {O,C,kh,kw} and linear {M,N} weights; biases,
// norm shifts zero; norm gains one (name suffix convention: .g gain, .b shift,
// .w weight, .bias bias). Walks names in sorted order so initialization does
// not depend on creation order.
template <typename T>
void init_params(ParamStore<T>& store, Rng& rng, const std::string& prefix) {
  for (const auto& [name, var] : store.all()) {
    if (name.rfind(prefix, 0) != 0) continue;
    const auto& shape = var->value.shape();
    Tensor<T>& t = var->value;
    const bool is_gain = name.size() > 2 && name.compare(name.size() - 2, 2, ".g") == 0;
    const bool is_shift = name.size() > 2 && name.compare(name.size() - 2, 2, ".b") == 0;
    const bool is_bias = name.size() > 5 && name.compare(name.size() - 5, 5, ".bias") == 0;
    if (is_gain) {
      for (std::size_t i = 0; i < t.numel(); ++i) t[i] = T(1);
    } else if (is_shift || is_bias) {
      for (std::size_t i = 0; i < t.numel(); ++i) t[i] = T(0);
    } else {
      std::size_t fan_in = 1;
      for (std::size_t d = 1; d < shape.size(); ++d) fan_in *= static_cast<std::size_t>(shape[d]);
      const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
      for (std::size_t i = 0; i < t.numel(); ++i)
        t[i] = static_cast<T>(rng.normal() * std_dev);
    }
  }
}

}  // namespace pano360::nn
