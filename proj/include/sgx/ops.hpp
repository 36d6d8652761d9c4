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

#include <memory>
#include <span>
#include <vector>

#include "sgx/graph.hpp"
#include "sgx/sparse.hpp"
#include "sgx/tensor.hpp"

// Differentiable primitives. All shape mismatches raise DimensionError with
// both shapes in the message.
namespace sgx::ops {

Tensor matmul(const Tensor& x, const Tensor& w);
// x[n x d] * W[d x q] + b[1 x q]
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
// a + c elementwise for a constant array c of the same size.
Tensor add_constant(const Tensor& a, std::span<const double> c);
// Row-wise multiplication by a constant vector (one factor per row).
Tensor scale_rows(const Tensor& a, std::span<const double> factors);
// (1 + eps) * h for a learnable 1 x 1 eps.
Tensor one_plus_eps_scale(const Tensor& h, const Tensor& eps);

// max(0, x); the subgradient at 0 is 0.
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// D * x for a constant sparse D (rectangular allowed). Backward uses D^T.
Tensor spmm(std::shared_ptr<const SparseMatrix> d, const Tensor& x);
// A_w * x where A_w has the constant pattern `p` and differentiable entry
// weights w[num_slots x 1].
Tensor spmm_weighted(std::shared_ptr<const EdgePattern> p, const Tensor& w, const Tensor& x);

Tensor sum_rows(const Tensor& x);   // [n x d] -> [1 x d]
Tensor mean_rows(const Tensor& x);  // [n x d] -> [1 x d]
Tensor sum_all(const Tensor& x);    // -> [1 x 1]

// Mean over rows of -log softmax(logits[r])[targets[r]], stabilized by
// max-subtraction. Backward is (softmax - onehot) / rows.
Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> targets);
Tensor softmax_cross_entropy(const Tensor& logits, int target);

// Forward value `hard`, backward identity into `soft` (straight-through).
Tensor straight_through(std::vector<double> hard, const Tensor& soft);

// Row k = [z_u ; z_v] for edge k = (u, v). Result is [|E| x 2w].
Tensor edge_pair_features(const Tensor& z, std::span<const Edge> edges);

}  // namespace sgx::ops
