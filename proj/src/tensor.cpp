// Copyright 2026 The sgx Authors
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

#include "sgx/tensor.hpp"

#include <malloc.h>

#include <algorithm>
#include <string>
#include <unordered_set>

#include "sgx/errors.hpp"

namespace sgx {

void keep_freed_buffers() {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 64 << 20);
}

std::vector<double>& TensorNode::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  return grad;
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  return from(rows, cols, std::vector<double>(rows * cols, 0.0), requires_grad);
}

Tensor Tensor::from(std::size_t rows, std::size_t cols, std::vector<double> values,
                    bool requires_grad) {
  if (values.size() != rows * cols) {
    throw DimensionError("tensor of shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " given " + std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<TensorNode>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double v, bool requires_grad) { return from(1, 1, {v}, requires_grad); }

double Tensor::item() const {
  if (size() != 1) {
    throw DimensionError("item() on a " + std::to_string(rows()) + "x" + std::to_string(cols()) + " tensor");
  }
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::clone() const { return from(rows(), cols(), node_->value, false); }

Tensor make_op(std::size_t rows, std::size_t cols, std::vector<double> value,
               std::vector<Tensor> parents, std::function<void(TensorNode&)> backward) {
  Tensor out = Tensor::from(rows, cols, std::move(value));
  const bool needs = std::any_of(parents.begin(), parents.end(),
                                 [](const Tensor& p) { return p.requires_grad(); });
  if (needs) {
    auto& node = *out.node();
    node.requires_grad = true;
    node.parents.reserve(parents.size());
    for (auto& p : parents) node.parents.push_back(p.node());
    node.backward_fn = std::move(backward);
  }
  return out;
}

Tape::Tape(const Tensor& root) : root_(root.node()) {
  if (root_->value.size() != 1) {
    throw DimensionError("backward root must be a scalar, got " + std::to_string(root_->rows) +
                         "x" + std::to_string(root_->cols));
  }
  if (!root_->requires_grad) return;
  // Iterative post-order DFS; parents are pushed in declaration order so the
  // resulting order is a deterministic function of the graph.
  std::unordered_set<const TensorNode*> seen;
  std::vector<std::pair<TensorNode*, std::size_t>> stack{{root_.get(), 0}};
  seen.insert(root_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order_.push_back(node);
      stack.pop_back();
    }
  }
}

void Tape::backward() {
  visits_ = 0;
  if (order_.empty()) return;
  for (TensorNode* n : order_) {
    if (n->backward_fn) {
      auto& g = n->ensure_grad();
      std::fill(g.begin(), g.end(), 0.0);
    }
  }
  root_->ensure_grad()[0] += 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    if ((*it)->backward_fn) {
      (*it)->backward_fn(**it);
      ++visits_;
    }
  }
}

}  // namespace sgx
