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

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace sgx {

// Storage and autodiff record for one tensor. Produced by ops; user code
// normally holds a Tensor handle instead.
struct TensorNode {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(TensorNode&)> backward_fn;

  std::vector<double>& ensure_grad();
};

// Shared handle to a row-major 2-D tensor of 64-bit reals. Vectors are 1 x q
// (or q x 1) matrices and scalars are 1 x 1. Copying a Tensor aliases it.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor from(std::size_t rows, std::size_t cols, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  std::size_t rows() const { return node_->rows; }
  std::size_t cols() const { return node_->cols; }
  std::size_t size() const { return node_->value.size(); }
  std::array<std::size_t, 2> shape() const { return {node_->rows, node_->cols}; }

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * node_->cols + c]; }
  double item() const;

  // Empty until a backward pass has reached this tensor.
  std::span<const double> grad() const { return node_->grad; }
  void zero_grad();

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }

  // Detached deep copy of the values.
  Tensor clone() const;

  const std::shared_ptr<TensorNode>& node() const { return node_; }

 private:
  std::shared_ptr<TensorNode> node_;
};

// Registers a primitive: `value` is the forward result and `backward` the
// rule that pushes the output gradient into `parents`. The result requires a
// gradient iff any parent does; otherwise `backward` is dropped.
Tensor make_op(std::size_t rows, std::size_t cols, std::vector<double> value,
               std::vector<Tensor> parents, std::function<void(TensorNode&)> backward);

// Topologically ordered record of every gradient-carrying node reachable from
// a scalar root.
class Tape {
 public:
  explicit Tape(const Tensor& root);

  // Zeroes interior gradients, seeds d(root)/d(root) = 1 and runs each
  // recorded backward rule once, root first. Leaf gradients accumulate.
  void backward();

  std::size_t size() const { return order_.size(); }
  // Number of backward rules executed by the last backward().
  std::size_t last_visits() const { return visits_; }

 private:
  std::shared_ptr<TensorNode> root_;
  std::vector<TensorNode*> order_;  // parents before children
  std::size_t visits_ = 0;
};

inline void backward(const Tensor& root) { Tape(root).backward(); }

// Keeps freed tensor buffers on the heap instead of handing them back to the
// kernel after every step. Training allocates the same large blocks each
// minibatch, and mmap/munmap churn otherwise dominates system time.
void keep_freed_buffers();

}  // namespace sgx
