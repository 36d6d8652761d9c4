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

#include "sgx/batch.hpp"

#include <string>

#include "sgx/errors.hpp"

namespace sgx {
namespace {

using Entry = SparseMatrix::Entry;

std::shared_ptr<const SparseMatrix> make_sparse(std::size_t rows, std::size_t cols,
                                                const std::vector<Entry>& e) {
  return std::make_shared<const SparseMatrix>(rows, cols, e);
}

}  // namespace

GraphBatch make_graph_batch(std::span<const Graph* const> graphs,
                            std::span<const EdgeMask* const> masks) {
  if (!masks.empty() && masks.size() != graphs.size()) {
    throw DimensionError("batch given " + std::to_string(masks.size()) + " masks for " +
                         std::to_string(graphs.size()) + " graphs");
  }
  GraphBatch b;
  b.num_graphs = graphs.size();
  const std::size_t d = graphs.empty() ? 0 : graphs.front()->features.cols;
  std::size_t n_total = 0, e_total = 0;
  for (const Graph* g : graphs) {
    b.node_offset.push_back(n_total);
    b.edge_offset.push_back(e_total);
    n_total += static_cast<std::size_t>(g->num_nodes);
    e_total += g->num_edges();
  }
  b.node_offset.push_back(n_total);
  b.edge_offset.push_back(e_total);
  b.num_nodes = n_total;

  std::vector<double> x(n_total * d, 0.0);
  std::vector<Entry> adj, pool, edge_mean;
  std::vector<EdgePattern::Entry> pattern;
  adj.reserve(2 * e_total);
  pattern.reserve(2 * e_total);
  b.edges.reserve(e_total);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = *graphs[gi];
    if (g.features.cols != d) throw DimensionError("graphs in a batch must share the feature width");
    const EdgeMask* mask = masks.empty() ? nullptr : masks[gi];
    if (mask && mask->bits.size() != g.num_edges()) {
      throw DimensionError("mask length " + std::to_string(mask->bits.size()) + " != " +
                           std::to_string(g.num_edges()) + " edges");
    }
    const auto off = static_cast<int>(b.node_offset[gi]);
    std::copy(g.features.data.begin(), g.features.data.end(),
              x.begin() + static_cast<std::ptrdiff_t>(b.node_offset[gi] * d));
    const int deleted = mask && mask->deleted_node ? *mask->deleted_node : -1;
    if (deleted >= 0) {
      std::fill_n(x.begin() + static_cast<std::ptrdiff_t>((b.node_offset[gi] + static_cast<std::size_t>(deleted)) * d), d, 0.0);
    }
    for (int v = 0; v < g.num_nodes; ++v) {
      if (v != deleted) pool.push_back({static_cast<int>(gi), off + v, 1.0});
    }
    const double inv_e = g.num_edges() ? 1.0 / static_cast<double>(g.num_edges()) : 0.0;
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      const Edge e{g.edges[k].u + off, g.edges[k].v + off};
      const auto slot = static_cast<int>(b.edge_offset[gi] + k);
      b.edges.push_back(e);
      pattern.push_back({e.u, e.v, slot});
      pattern.push_back({e.v, e.u, slot});
      edge_mean.push_back({static_cast<int>(gi), slot, inv_e});
      if (!mask || mask->bits[k]) {
        adj.push_back({e.u, e.v, 1.0});
        adj.push_back({e.v, e.u, 1.0});
      }
    }
    b.labels.push_back(g.label);
    b.graph_ids.push_back(g.id);
  }
  b.features = Tensor::from(n_total, d, std::move(x));
  b.adjacency = make_sparse(n_total, n_total, adj);
  b.pool = make_sparse(b.num_graphs, n_total, pool);
  b.edge_mean = make_sparse(b.num_graphs, e_total, edge_mean);
  b.edge_pattern = std::make_shared<const EdgePattern>(n_total, e_total, pattern);
  return b;
}

BagBatch make_bag_batch(std::span<const SubgraphBag* const> bags) {
  BagBatch b;
  b.num_graphs = bags.size();
  std::size_t d = 0;
  for (const auto* bag : bags) {
    validate_bag(*bag);
    const auto n = static_cast<std::size_t>(bag->base->num_nodes);
    if (b.num_subgraphs == 0) d = bag->base->features.cols;
    if (bag->base->features.cols != d) throw DimensionError("bags in a batch must share the feature width");
    b.num_subgraphs += bag->size();
    b.copy_rows += bag->size() * n;
    b.base_rows += n;
  }
  std::vector<double> x(b.copy_rows * d, 0.0);
  std::vector<Entry> adj, agg, gather, pool, set_mean;
  std::size_t copy_off = 0, base_off = 0, sub = 0;
  for (std::size_t gi = 0; gi < bags.size(); ++gi) {
    const SubgraphBag& bag = *bags[gi];
    const Graph& g = *bag.base;
    const auto n = static_cast<std::size_t>(g.num_nodes);
    std::vector<double> multiplicity(g.num_edges(), 0.0);
    const double inv_m = 1.0 / static_cast<double>(bag.size());
    for (const auto& mask : bag.masks) {
      const int deleted = mask.deleted_node ? *mask.deleted_node : -1;
      std::copy(g.features.data.begin(), g.features.data.end(),
                x.begin() + static_cast<std::ptrdiff_t>(copy_off * d));
      if (deleted >= 0) {
        std::fill_n(x.begin() + static_cast<std::ptrdiff_t>((copy_off + static_cast<std::size_t>(deleted)) * d), d, 0.0);
      }
      const auto co = static_cast<int>(copy_off);
      for (std::size_t k = 0; k < g.num_edges(); ++k) {
        if (!mask.bits[k]) continue;
        multiplicity[k] += 1.0;
        adj.push_back({co + g.edges[k].u, co + g.edges[k].v, 1.0});
        adj.push_back({co + g.edges[k].v, co + g.edges[k].u, 1.0});
      }
      for (std::size_t v = 0; v < n; ++v) {
        gather.push_back({static_cast<int>(base_off + v), static_cast<int>(copy_off + v), inv_m});
        if (static_cast<int>(v) != deleted) pool.push_back({static_cast<int>(sub), static_cast<int>(copy_off + v), 1.0});
      }
      set_mean.push_back({static_cast<int>(gi), static_cast<int>(sub), inv_m});
      copy_off += n;
      ++sub;
    }
    const auto bo = static_cast<int>(base_off);
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      if (multiplicity[k] == 0.0) continue;
      agg.push_back({bo + g.edges[k].u, bo + g.edges[k].v, multiplicity[k] * inv_m});
      agg.push_back({bo + g.edges[k].v, bo + g.edges[k].u, multiplicity[k] * inv_m});
    }
    base_off += n;
    b.labels.push_back(g.label);
  }
  b.copy_features = Tensor::from(b.copy_rows, d, std::move(x));
  b.copy_adjacency = make_sparse(b.copy_rows, b.copy_rows, adj);
  b.agg_adjacency = make_sparse(b.base_rows, b.base_rows, agg);
  b.gather = make_sparse(b.base_rows, b.copy_rows, gather);
  std::vector<Entry> bcast;
  bcast.reserve(gather.size());
  for (const auto& e : gather) bcast.push_back({e.col, e.row, 1.0});
  b.broadcast = make_sparse(b.copy_rows, b.base_rows, bcast);
  b.pool = make_sparse(b.num_subgraphs, b.copy_rows, pool);
  b.set_mean = make_sparse(b.num_graphs, b.num_subgraphs, set_mean);
  return b;
}

}  // namespace sgx
