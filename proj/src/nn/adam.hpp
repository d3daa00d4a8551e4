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
#include <utility>
#include <vector>

#include "nn/graph.hpp"

namespace pano360::nn {

// Adam over an explicit parameter subset: only the names passed to step()
// ever move, so frozen groups stay bit-identical through a training stage.
template <typename T>
class Adam {
 public:
  Adam(T lr, T beta1, T beta2, T eps = T(1e-8)) : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

  void step(const std::vector<std::pair<std::string, Var<T>>>& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(static_cast<double>(b1_), static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(static_cast<double>(b2_), static_cast<double>(t_));
    for (const auto& [name, var] : params) {
      Tensor<T>& val = var->value;
      auto& slot = slots_[name];
      if (slot.m.empty()) {
        slot.m.assign(val.numel(), T(0));
        slot.v.assign(val.numel(), T(0));
      }
      const bool has_grad = !var->grad.empty();
      for (std::size_t i = 0; i < val.numel(); ++i) {
        const T g = has_grad ? var->grad[i] : T(0);
        slot.m[i] = b1_ * slot.m[i] + (T(1) - b1_) * g;
        slot.v[i] = b2_ * slot.v[i] + (T(1) - b2_) * g * g;
        const double mh = static_cast<double>(slot.m[i]) / bc1;
        const double vh = static_cast<double>(slot.v[i]) / bc2;
        val[i] -= static_cast<T>(static_cast<double>(lr_) * mh / (std::sqrt(vh) + eps_));
      }
      var->grad.release();
    }
  }

  long step_count() const { return t_; }
  void set_step_count(long t) { t_ = t; }

  struct Slot {
    std::vector<T> m, v;
  };
  const std::map<std::string, Slot>& slots() const { return slots_; }
  void restore_slot(const std::string& name, std::vector<T> m, std::vector<T> v) {
    slots_[name] = Slot{std::move(m), std::move(v)};
  }

 private:
  T lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::map<std::string, Slot> slots_;
};

}  // namespace pano360::nn
