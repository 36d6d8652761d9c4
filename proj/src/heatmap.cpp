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

#include "sgx/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "sgx/errors.hpp"
#include "sgx/io.hpp"

namespace sgx {

ExplanationHeatmap aggregate_heatmap(const SubgraphBag& bag) {
  validate_bag(bag);
  const Graph& g = *bag.base;
  ExplanationHeatmap h;
  h.graph_id = g.id;
  h.num_nodes = g.num_nodes;
  h.edges = g.edges;
  h.provenance = to_string(bag.policy);
  h.bag_size = static_cast<int>(bag.size());
  h.motif_edges = g.motif_edges;
  std::vector<int> counts(g.num_edges(), 0);
  for (const auto& m : bag.masks) {
    for (std::size_t k = 0; k < m.bits.size(); ++k) counts[k] += m.bits[k];
  }
  h.weights.resize(counts.size());
  const auto m = static_cast<double>(bag.size());
  for (std::size_t k = 0; k < counts.size(); ++k) h.weights[k] = static_cast<double>(counts[k]) / m;
  return h;
}

nlohmann::json heatmap_to_json(const ExplanationHeatmap& h) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t k = 0; k < h.edges.size(); ++k) {
    edges.push_back({h.edges[k].u, h.edges[k].v, h.weights[k]});
  }
  nlohmann::json j = {{"graph_id", h.graph_id}, {"num_nodes", h.num_nodes},
                      {"edges", std::move(edges)}, {"provenance", h.provenance},
                      {"bag_size", h.bag_size}};
  j["motif_edges"] = h.motif_edges ? nlohmann::json(*h.motif_edges) : nlohmann::json(nullptr);
  return j;
}

ExplanationHeatmap heatmap_from_json(const nlohmann::json& j) {
  ExplanationHeatmap h;
  h.graph_id = j.at("graph_id").get<int>();
  h.num_nodes = j.value("num_nodes", 0);
  for (const auto& e : j.at("edges")) {
    if (e.size() != 3) throw FormatError("heatmap edge must be [i, j, weight]");
    h.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    const double w = e[2].get<double>();
    if (!(w >= 0.0 && w <= 1.0)) throw FormatError("heatmap weight outside [0, 1]");
    h.weights.push_back(w);
  }
  h.provenance = j.value("provenance", "");
  h.bag_size = j.value("bag_size", 0);
  if (j.contains("motif_edges") && !j["motif_edges"].is_null()) {
    h.motif_edges = j["motif_edges"].get<std::vector<int>>();
  }
  return h;
}

std::size_t ramp_index(double weight) {
  const double w = std::clamp(weight, 0.0, 1.0);
  return std::min<std::size_t>(kHeatRamp.size() - 1, static_cast<std::size_t>(std::floor(w * 10.0)));
}

double pen_width(double weight) { return 1.0 + 4.0 * std::clamp(weight, 0.0, 1.0); }

namespace {

std::set<int> motif_set(const ExplanationHeatmap& h) {
  return h.motif_edges ? std::set<int>(h.motif_edges->begin(), h.motif_edges->end()) : std::set<int>{};
}

}  // namespace

std::string heatmap_to_dot(const ExplanationHeatmap& h) {
  const auto motif = motif_set(h);
  std::ostringstream out;
  out << "graph heatmap_" << h.graph_id << " {\n";
  out << "  // provenance=" << h.provenance << " bag_size=" << h.bag_size << "\n";
  out << "  node [shape=circle, style=filled, fillcolor=\"#f0f0f0\"];\n";
  for (int v = 0; v < h.num_nodes; ++v) out << "  " << v << ";\n";
  for (std::size_t k = 0; k < h.edges.size(); ++k) {
    const double w = h.weights[k];
    const char* color = kHeatRamp[ramp_index(w)];
    out << "  " << h.edges[k].u << " -- " << h.edges[k].v << " [penwidth=" << pen_width(w);
    if (motif.count(static_cast<int>(k))) {
      out << ", color=\"black:" << color << ":black\"";
    } else {
      out << ", color=\"" << color << "\"";
    }
    out << ", tooltip=\"" << w << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string heatmap_to_svg(const ExplanationHeatmap& h) {
  const auto motif = motif_set(h);
  constexpr double size = 480.0, radius = 200.0, c = size / 2.0;
  std::vector<std::pair<double, double>> pos(static_cast<std::size_t>(h.num_nodes));
  for (int v = 0; v < h.num_nodes; ++v) {
    const double a = 2.0 * std::numbers::pi * v / std::max(1, h.num_nodes);
    pos[static_cast<std::size_t>(v)] = {c + radius * std::cos(a), c + radius * std::sin(a)};
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < h.edges.size(); ++k) {
    const auto [x1, y1] = pos[static_cast<std::size_t>(h.edges[k].u)];
    const auto [x2, y2] = pos[static_cast<std::size_t>(h.edges[k].v)];
    const double w = h.weights[k];
    if (motif.count(static_cast<int>(k))) {
      out << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
          << "\" stroke=\"black\" stroke-width=\"" << pen_width(w) + 3.0 << "\"/>\n";
    }
    out << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
        << "\" stroke=\"" << kHeatRamp[ramp_index(w)] << "\" stroke-width=\"" << pen_width(w)
        << "\" data-weight=\"" << w << "\"/>\n";
  }
  for (int v = 0; v < h.num_nodes; ++v) {
    const auto [x, y] = pos[static_cast<std::size_t>(v)];
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"9\" fill=\"#f0f0f0\" stroke=\"#555\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << y + 3.5 << "\" font-size=\"9\" text-anchor=\"middle\">" << v
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

HeatmapFormat heatmap_format_from_string(const std::string& s) {
  if (s == "json") return HeatmapFormat::kJson;
  if (s == "dot") return HeatmapFormat::kDot;
  if (s == "svg") return HeatmapFormat::kSvg;
  throw ArgumentError("unknown heatmap format '" + s + "'");
}

void export_heatmap(const ExplanationHeatmap& h, HeatmapFormat format,
                    const std::filesystem::path& path) {
  switch (format) {
    case HeatmapFormat::kJson: write_file_atomic(path, heatmap_to_json(h).dump(1)); break;
    case HeatmapFormat::kDot: write_file_atomic(path, heatmap_to_dot(h)); break;
    case HeatmapFormat::kSvg: write_file_atomic(path, heatmap_to_svg(h)); break;
  }
}

MotifContrast motif_contrast(const ExplanationHeatmap& h) {
  const auto motif = motif_set(h);
  double ms = 0.0, bs = 0.0;
  int mc = 0, bc = 0;
  for (std::size_t k = 0; k < h.weights.size(); ++k) {
    if (motif.count(static_cast<int>(k))) {
      ms += h.weights[k];
      ++mc;
    } else {
      bs += h.weights[k];
      ++bc;
    }
  }
  return {mc ? ms / mc : 0.0, bc ? bs / bc : 0.0};
}

}  // namespace sgx
