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

#include <filesystem>
#include <string>

#include "sgx/graph.hpp"

namespace sgx {

// Reads a dataset in the TU benchmark multi-file layout:
//   <name>_A.txt               "i, j" per line, 1-based global node ids
//   <name>_graph_indicator.txt 1-based graph id of node k on line k
//   <name>_graph_labels.txt    one integer per graph
//   <name>_node_labels.txt     one integer per node (optional)
// Both directions of each edge are expected; they are merged into one
// undirected edge. Graph labels are remapped to 0..c-1 in sorted order.
//
// Features follow `spec`: node-label one-hot (falls back to degree one-hot
// when the label file is absent), capped degree one-hot, or a constant column.
GraphDataset load_tud_dataset(const std::filesystem::path& root_dir, const std::string& name,
                              FeatureSpec spec = {});

// Writes `ds` in the same layout (both edge directions, 0-based class labels).
// The node-label file is written only when every graph carries node labels.
void write_tud_dataset(const GraphDataset& ds, const std::filesystem::path& dir,
                       const std::string& name);

// Rebuilds node features for every graph from `spec` (node labels, degrees or
// constant). Updates ds.feature_spec.
void encode_features(GraphDataset& ds, FeatureSpec spec);

}  // namespace sgx
