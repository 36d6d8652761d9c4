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

#include "sgx/ba2motifs.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "sgx/errors.hpp"
#include "sgx/io.hpp"

namespace sgx {
namespace {

// Preferential attachment with one edge per new node. `ends` holds every edge
// endpoint, so a uniform draw from it is a degree-proportional draw.
std::vector<std::pair<int, int>> ba_tree(int n, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  std::vector<int> ends;
  for (int v = 1; v < n; ++v) {
    int target = 0;
    if (!ends.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
      target = ends[pick(rng)];
    }
    edges.emplace_back(target, v);
    ends.push_back(target);
    ends.push_back(v);
  }
  return edges;
}

}  // namespace

GraphDataset generate_ba2motifs(int n_graphs, std::uint64_t seed) {
  if (n_graphs <= 0) throw ArgumentError("n_graphs must be positive, got " + std::to_string(n_graphs));
  if (n_graphs % 2 != 0) throw ArgumentError("n_graphs must be even, got " + std::to_string(n_graphs));
  std::mt19937_64 rng(seed);
  GraphDataset ds;
  ds.name = "BA-2Motifs";
  ds.num_classes = 2;
  ds.feature_spec = {FeatureKind::kConstant, 0};
  ds.graphs.reserve(static_cast<std::size_t>(n_graphs));

  constexpr int m0 = kBaBaseNodes;
  for (int i = 0; i < n_graphs; ++i) {
    const int label = i % 2;
    auto pairs = ba_tree(kBaBaseNodes, rng);
    const std::size_t base_edges = pairs.size();
    if (label == 0) {
      // house: square m0..m0+3 with roof m0+4 over the edge (m0, m0+1)
      pairs.insert(pairs.end(), {{m0, m0 + 1}, {m0 + 1, m0 + 2}, {m0 + 2, m0 + 3}, {m0 + 3, m0},
                                 {m0, m0 + 4}, {m0 + 1, m0 + 4}});
    } else {
      for (int k = 0; k < kMotifNodes; ++k) pairs.emplace_back(m0 + k, m0 + (k + 1) % kMotifNodes);
    }
    std::uniform_int_distribution<int> anchor(0, kBaBaseNodes - 1);
    pairs.emplace_back(anchor(rng), m0);

    const int n = kBaBaseNodes + kMotifNodes;
    Graph g = make_graph(n, pairs, DenseMatrix(static_cast<std::size_t>(n), 1, 1.0), label);
    g.id = i;
    std::vector<int> motif;
    for (std::size_t k = base_edges; k < pairs.size(); ++k) {
      motif.push_back(g.edge_index(pairs[k].first, pairs[k].second));
    }
    std::sort(motif.begin(), motif.end());
    g.motif_edges = std::move(motif);
    ds.graphs.push_back(std::move(g));
  }
  return ds;
}

void write_motif_edges_json(const GraphDataset& ds, const std::filesystem::path& path) {
  nlohmann::json j;
  j["graphs"] = nlohmann::json::array();
  for (const auto& g : ds.graphs) {
    if (!g.motif_edges) continue;
    j["graphs"].push_back({{"graph_id", g.id}, {"motif_edges", *g.motif_edges}});
  }
  write_file_atomic(path, j.dump(1));
}

void read_motif_edges_json(GraphDataset& ds, const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  for (const auto& entry : j.at("graphs")) {
    const int id = entry.at("graph_id").get<int>();
    if (id < 0 || static_cast<std::size_t>(id) >= ds.graphs.size()) {
      throw FormatError(path.filename().string() + ": unknown graph_id " + std::to_string(id));
    }
    auto& g = ds.graphs[static_cast<std::size_t>(id)];
    auto edges = entry.at("motif_edges").get<std::vector<int>>();
    for (int k : edges) {
      if (k < 0 || static_cast<std::size_t>(k) >= g.num_edges()) {
        throw FormatError(path.filename().string() + ": motif edge " + std::to_string(k) +
                          " out of range for graph " + std::to_string(id));
      }
    }
    g.motif_edges = std::move(edges);
  }
}

}  // namespace sgx
