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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgx/sparse.hpp"

namespace sgx {

// Row-major dense matrix of 64-bit reals.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const DenseMatrix&) const = default;
};

// Undirected edge stored canonically with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

// Undirected, unweighted graph. Edges are canonical (u < v) and sorted, so an
// edge index is a stable identifier for masks and heatmaps.
struct Graph {
  int id = 0;
  int num_nodes = 0;
  std::vector<Edge> edges;
  DenseMatrix features;
  int label = 0;
  // Raw integer node labels when the source provided them (TUD round-trip).
  std::vector<int> node_labels;
  // Indices into `edges`; populated for synthetic data only.
  std::optional<std::vector<int>> motif_edges;

  std::size_t num_edges() const { return edges.size(); }
  // Index of edge {a, b} in `edges`, or -1.
  int edge_index(int a, int b) const;
};

// Builds a graph from an arbitrary list of endpoint pairs. Pairs are
// canonicalized and sorted; self-loops, duplicates and out-of-range endpoints
// raise FormatError. An empty feature matrix is replaced by a constant column.
Graph make_graph(int num_nodes, std::span<const std::pair<int, int>> pairs,
                 DenseMatrix features = {}, int label = 0);

// Throws FormatError if any Graph invariant is violated.
void validate_graph(const Graph& g);

std::vector<int> degrees(const Graph& g);

// Row v is the one-hot encoding of min(deg(v), cap) in dimension cap + 1.
DenseMatrix degree_features(const Graph& g, int cap);

enum class FeatureKind { kNodeLabelsOneHot, kDegreeOneHot, kConstant };

struct FeatureSpec {
  FeatureKind kind = FeatureKind::kNodeLabelsOneHot;
  // Degree cap; 0 means "use the maximum observed degree".
  int cap = 0;
};

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);

struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  int num_classes = 0;
  FeatureSpec feature_spec;

  std::size_t size() const { return graphs.size(); }
  std::size_t feature_dim() const {
    return graphs.empty() ? 0 : graphs.front().features.cols;
  }
};

// Throws DataError if labels or feature widths are inconsistent.
void validate_dataset(const GraphDataset& ds);

enum class ConnectivityKind { kAdjacency, kAdjacencyPlusSelf, kGinEpsilon };

// Sparse operator D with the sparsity pattern of A (plus the diagonal for the
// self-loop kinds). kGinEpsilon places (1 + eps) on the diagonal.
SparseMatrix connectivity_operator(const Graph& g, ConnectivityKind kind, double eps = 0.0);

struct PermutedGraph {
  Graph graph;
  // edge_map[k] is the index in `graph.edges` of original edge k.
  std::vector<int> edge_map;
};

// Relabels node v as perm[v]. Features, node labels and motif edges follow.
PermutedGraph permute_nodes(const Graph& g, std::span<const int> perm);

}  // namespace sgx
