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

#include "sgx/graph.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "sgx/errors.hpp"

namespace sgx {

int Graph::edge_index(int a, int b) const {
  const Edge key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) return -1;
  return static_cast<int>(it - edges.begin());
}

Graph make_graph(int num_nodes, std::span<const std::pair<int, int>> pairs,
                 DenseMatrix features, int label) {
  Graph g;
  g.num_nodes = num_nodes;
  g.label = label;
  g.edges.reserve(pairs.size());
  for (auto [a, b] : pairs) g.edges.push_back({std::min(a, b), std::max(a, b)});
  std::sort(g.edges.begin(), g.edges.end());
  if (features.rows == 0 && features.cols == 0) {
    features = DenseMatrix(static_cast<std::size_t>(num_nodes), 1, 1.0);
  }
  g.features = std::move(features);
  validate_graph(g);
  return g;
}

void validate_graph(const Graph& g) {
  if (g.num_nodes < 0) throw FormatError("negative node count");
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    if (e.u == e.v) throw FormatError("self-loop on node " + std::to_string(e.u));
    if (e.u > e.v) throw FormatError("edge " + std::to_string(k) + " is not canonical");
    if (e.u < 0 || e.v >= g.num_nodes) {
      throw FormatError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                        ") references a node outside [0, " + std::to_string(g.num_nodes) + ")");
    }
    if (k > 0 && !(g.edges[k - 1] < e)) {
      throw FormatError("duplicate or unsorted edge (" + std::to_string(e.u) + ", " +
                        std::to_string(e.v) + ")");
    }
  }
  if (g.features.rows != static_cast<std::size_t>(g.num_nodes)) {
    throw FormatError("feature matrix has " + std::to_string(g.features.rows) + " rows for " +
                      std::to_string(g.num_nodes) + " nodes");
  }
}

std::vector<int> degrees(const Graph& g) {
  std::vector<int> deg(static_cast<std::size_t>(g.num_nodes), 0);
  for (const auto& e : g.edges) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

DenseMatrix degree_features(const Graph& g, int cap) {
  if (cap < 1) throw ArgumentError("degree cap must be >= 1, got " + std::to_string(cap));
  DenseMatrix x(static_cast<std::size_t>(g.num_nodes), static_cast<std::size_t>(cap) + 1);
  const auto deg = degrees(g);
  for (std::size_t v = 0; v < deg.size(); ++v) x(v, static_cast<std::size_t>(std::min(deg[v], cap))) = 1.0;
  return x;
}

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kNodeLabelsOneHot: return "node_labels_onehot";
    case FeatureKind::kDegreeOneHot: return "degree_onehot";
    case FeatureKind::kConstant: return "constant";
  }
  return "?";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "node_labels_onehot") return FeatureKind::kNodeLabelsOneHot;
  if (s == "degree_onehot") return FeatureKind::kDegreeOneHot;
  if (s == "constant") return FeatureKind::kConstant;
  throw ArgumentError("unknown feature spec '" + s + "'");
}

void validate_dataset(const GraphDataset& ds) {
  const std::size_t d = ds.feature_dim();
  for (const auto& g : ds.graphs) {
    if (g.label < 0 || g.label >= ds.num_classes) {
      throw DataError("graph " + std::to_string(g.id) + " has label " + std::to_string(g.label) +
                      " outside [0, " + std::to_string(ds.num_classes) + ")");
    }
    if (g.features.cols != d) {
      throw DataError("graph " + std::to_string(g.id) + " has feature width " +
                      std::to_string(g.features.cols) + ", expected " + std::to_string(d));
    }
  }
}

SparseMatrix connectivity_operator(const Graph& g, ConnectivityKind kind, double eps) {
  std::vector<SparseMatrix::Entry> entries;
  entries.reserve(2 * g.edges.size() + static_cast<std::size_t>(g.num_nodes));
  for (const auto& e : g.edges) {
    entries.push_back({e.u, e.v, 1.0});
    entries.push_back({e.v, e.u, 1.0});
  }
  if (kind != ConnectivityKind::kAdjacency) {
    const double diag = kind == ConnectivityKind::kGinEpsilon ? 1.0 + eps : 1.0;
    for (int v = 0; v < g.num_nodes; ++v) entries.push_back({v, v, diag});
  }
  const auto n = static_cast<std::size_t>(g.num_nodes);
  return SparseMatrix(n, n, entries);
}

PermutedGraph permute_nodes(const Graph& g, std::span<const int> perm) {
  if (perm.size() != static_cast<std::size_t>(g.num_nodes)) {
    throw DimensionError("permutation length " + std::to_string(perm.size()) + " != " +
                         std::to_string(g.num_nodes) + " nodes");
  }
  std::set<int> seen(perm.begin(), perm.end());
  if (seen.size() != perm.size() || *seen.begin() != 0 || *seen.rbegin() != g.num_nodes - 1) {
    throw ArgumentError("not a permutation");
  }
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(g.edges.size());
  for (const auto& e : g.edges) pairs.emplace_back(perm[e.u], perm[e.v]);
  DenseMatrix x(g.features.rows, g.features.cols);
  for (int v = 0; v < g.num_nodes; ++v) {
    const auto src = g.features.row(static_cast<std::size_t>(v));
    std::copy(src.begin(), src.end(), x.data.begin() + static_cast<std::ptrdiff_t>(perm[v] * x.cols));
  }
  PermutedGraph out{make_graph(g.num_nodes, pairs, std::move(x), g.label), {}};
  out.graph.id = g.id;
  if (!g.node_labels.empty()) {
    out.graph.node_labels.resize(g.node_labels.size());
    for (int v = 0; v < g.num_nodes; ++v) out.graph.node_labels[perm[v]] = g.node_labels[v];
  }
  out.edge_map.resize(g.edges.size());
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    out.edge_map[k] = out.graph.edge_index(pairs[k].first, pairs[k].second);
  }
  if (g.motif_edges) {
    std::vector<int> m;
    for (int k : *g.motif_edges) m.push_back(out.edge_map[static_cast<std::size_t>(k)]);
    std::sort(m.begin(), m.end());
    out.graph.motif_edges = std::move(m);
  }
  return out;
}

}  // namespace sgx
