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

#include "sgx/bag.hpp"
#include "sgx/graph.hpp"
#include "sgx/sparse.hpp"
#include "sgx/tensor.hpp"

namespace sgx {

// Block-diagonal batch of graphs. Node rows of graph b start at
// node_offset[b]; edges of graph b start at edge_offset[b] in `edges`, which
// holds every (unmasked) edge with global node ids.
struct GraphBatch {
  std::size_t num_nodes = 0;
  std::size_t num_graphs = 0;
  Tensor features;
  // Adjacency with hard masks applied.
  std::shared_ptr<const SparseMatrix> adjacency;
  // All edges with weights taken from an external [|E| x 1] tensor.
  std::shared_ptr<const EdgePattern> edge_pattern;
  // [num_graphs x num_nodes] sum-pooling operator over live nodes.
  std::shared_ptr<const SparseMatrix> pool;
  // [num_graphs x |E|] operator averaging a per-edge column within a graph.
  std::shared_ptr<const SparseMatrix> edge_mean;
  std::vector<Edge> edges;
  std::vector<std::size_t> node_offset;
  std::vector<std::size_t> edge_offset;
  std::vector<int> labels;
  std::vector<int> graph_ids;
};

// `masks` is either empty or holds one (possibly null) mask per graph.
GraphBatch make_graph_batch(std::span<const Graph* const> graphs,
                            std::span<const EdgeMask* const> masks = {});

// Batch of subgraph bags laid out for the DSS encoder. Subgraph copies are
// stacked graph by graph, mask by mask.
struct BagBatch {
  std::size_t num_graphs = 0;
  std::size_t num_subgraphs = 0;
  std::size_t copy_rows = 0;  // sum over graphs of m * n
  std::size_t base_rows = 0;  // sum over graphs of n
  Tensor copy_features;       // [copy_rows x d], deleted nodes zeroed
  std::shared_ptr<const SparseMatrix> copy_adjacency;  // block diagonal, masked
  // Aggregate view scaled by 1/m: edge multiplicity / m, mean over copies.
  // Raw sums grow with the bag size and blow up through four layers.
  std::shared_ptr<const SparseMatrix> agg_adjacency;   // [base_rows]^2
  std::shared_ptr<const SparseMatrix> gather;     // [base_rows x copy_rows], averages copies
  std::shared_ptr<const SparseMatrix> broadcast;  // [copy_rows x base_rows], 0/1 copy-back
  std::shared_ptr<const SparseMatrix> pool;       // [num_subgraphs x copy_rows], live nodes
  std::shared_ptr<const SparseMatrix> set_mean;   // [num_graphs x num_subgraphs]
  std::vector<int> labels;
};

BagBatch make_bag_batch(std::span<const SubgraphBag* const> bags);

}  // namespace sgx
