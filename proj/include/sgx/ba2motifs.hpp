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

#include <cstdint>
#include <filesystem>

#include "sgx/graph.hpp"

namespace sgx {

inline constexpr int kBaBaseNodes = 20;
inline constexpr int kMotifNodes = 5;

// Synthetic two-motif benchmark. Every graph is a 20-node Barabasi-Albert tree
// (one edge per new node) with a 5-node motif hung off a random base node by a
// single bridge edge. Class 0 carries a house (square plus roof, 6 edges),
// class 1 a five-node cycle. Labels alternate so classes are balanced; the
// motif edges plus the bridge are recorded in Graph::motif_edges. Node
// features are a constant scalar.
GraphDataset generate_ba2motifs(int n_graphs, std::uint64_t seed);

// {"graphs": [{"graph_id": g, "motif_edges": [k, ...]}, ...]}
void write_motif_edges_json(const GraphDataset& ds, const std::filesystem::path& path);
// Attaches motif edges read from `path` to the matching graphs of `ds`.
void read_motif_edges_json(GraphDataset& ds, const std::filesystem::path& path);

}  // namespace sgx
