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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgx/bag.hpp"
#include "sgx/graph.hpp"

namespace sgx {

// Per-edge frequency of appearance across a bag of hard masks.
struct ExplanationHeatmap {
  int graph_id = 0;
  int num_nodes = 0;
  std::vector<Edge> edges;
  std::vector<double> weights;  // in [0, 1], one per edge
  std::string provenance;       // policy tag of the source bag
  int bag_size = 0;
  std::optional<std::vector<int>> motif_edges;

  bool operator==(const ExplanationHeatmap&) const = default;
};

// weight_k = (number of masks keeping edge k) / m.
ExplanationHeatmap aggregate_heatmap(const SubgraphBag& bag);

// {"graph_id", "num_nodes", "edges": [[i, j, weight], ...], "provenance",
//  "bag_size", "motif_edges"}
nlohmann::json heatmap_to_json(const ExplanationHeatmap& h);
ExplanationHeatmap heatmap_from_json(const nlohmann::json& j);

// Sequential 10-step ramp, lightest first.
inline constexpr std::array<const char*, 10> kHeatRamp = {
    "#fff5eb", "#fee6ce", "#fdd0a2", "#fdae6b", "#fd8d3c",
    "#f16913", "#e6550d", "#d94801", "#a63603", "#7f2704"};

// Ramp index for a weight: 0 for weight 0, 9 for weight 1.
std::size_t ramp_index(double weight);
double pen_width(double weight);

std::string heatmap_to_dot(const ExplanationHeatmap& h);
// Circular layout, same edge styling as the DOT form.
std::string heatmap_to_svg(const ExplanationHeatmap& h);

enum class HeatmapFormat { kJson, kDot, kSvg };
HeatmapFormat heatmap_format_from_string(const std::string& s);

// Writes atomically; throws IoError when the path is not writable.
void export_heatmap(const ExplanationHeatmap& h, HeatmapFormat format,
                    const std::filesystem::path& path);

// Mean heatmap weight over motif edges and over the remaining edges.
struct MotifContrast {
  double motif_mean = 0.0;
  double background_mean = 0.0;
};
MotifContrast motif_contrast(const ExplanationHeatmap& h);

}  // namespace sgx
