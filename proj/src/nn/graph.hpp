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

#include <functional>
#include <memory>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nn/tensor.hpp"

namespace pano360::nn {

// Reverse-mode tape node. Graphs are built per step and discarded; parameters
// are long-lived leaves owned by a ParamStore. backward() walks consumers
// before producers and releases each interior node's buffers right after its
// backward_fn runs, which keeps peak memory near the live-activation set.
template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;  // lazily allocated; shape follows value
  bool requires_grad = false;
  bool is_leaf = false;
  std::vector<std::shared_ptr<Node<T>>> parents;
  std::function<void(Node<T>&)> backward_fn;
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

template <typename T>
Var<T> make_leaf(Tensor<T> value, bool requires_grad) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  n->is_leaf = true;
  return n;
}

template <typename T>
Var<T> make_constant(Tensor<T> value) {
  return make_leaf(std::move(value), false);
}

// Shares no graph history with x; the value is copied.
template <typename T>
Var<T> detach(const Var<T>& x) {
  return make_constant(Tensor<T>(x->value));
}

template <typename T>
Tensor<T>& ensure_grad(Node<T>& n) {
  if (n.grad.empty()) n.grad = Tensor<T>(n.value.shape());
  return n.grad;
}

// Wires an op result: if no parent carries gradient the node degenerates to a
// constant and the closure is dropped, so frozen subgraphs cost no tape.
template <typename T, typename F>
Var<T> make_op(Tensor<T> value, std::vector<Var<T>> parents, F backward_fn) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  bool any = false;
  for (const auto& p : parents) any = any || p->requires_grad;
  if (any) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward_fn = std::move(backward_fn);
  }
  return n;
}

// Reverse-mode sweep from a scalar root. Interior values/grads are released
// as soon as their backward has run; leaves keep both (params feed the
// optimizer from their grad).
template <typename T>
void backward(const Var<T>& root) {
  if (!root || root->value.numel() != 1) throw DataError("backward needs a scalar root");
  if (!root->requires_grad) throw DataError("backward root does not require grad");

  std::vector<Node<T>*> order;  // producers before consumers
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad = Tensor<T>({1}, T(1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
    if (!n->is_leaf) {
      n->value.release();
      n->grad.release();
    }
  }
}

}  // namespace pano360::nn
