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

#include "sgx/tud.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sgx/errors.hpp"
#include "sgx/io.hpp"

namespace sgx {
namespace {

namespace fs = std::filesystem;

// Parses the comma/space separated integers on one line.
std::vector<long> parse_ints(const std::string& line, const fs::path& file, std::size_t lineno) {
  std::vector<long> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == ',' || *p == '\t' || *p == '\r')) ++p;
    if (p >= end) break;
    long v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) {
      throw FormatError(file.filename().string() + ":" + std::to_string(lineno) +
                        ": cannot parse '" + line + "'");
    }
    out.push_back(v);
    p = next;
  }
  return out;
}

std::vector<std::vector<long>> read_rows(const fs::path& file, bool mandatory) {
  std::ifstream in(file);
  if (!in) {
    if (mandatory) throw IngestionError("missing file " + file.string());
    return {};
  }
  std::vector<std::vector<long>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto v = parse_ints(line, file, lineno);
    if (v.empty()) continue;
    rows.push_back(std::move(v));
  }
  return rows;
}

std::vector<long> read_column(const fs::path& file, bool mandatory) {
  std::vector<long> col;
  for (auto& r : read_rows(file, mandatory)) {
    if (r.size() != 1) throw FormatError(file.filename().string() + ": expected one value per line");
    col.push_back(r[0]);
  }
  return col;
}

}  // namespace

void encode_features(GraphDataset& ds, FeatureSpec spec) {
  const bool have_labels =
      !ds.graphs.empty() && std::all_of(ds.graphs.begin(), ds.graphs.end(), [](const Graph& g) {
        return static_cast<int>(g.node_labels.size()) == g.num_nodes;
      });
  if (spec.kind == FeatureKind::kNodeLabelsOneHot && !have_labels) {
    spec.kind = FeatureKind::kDegreeOneHot;
  }
  switch (spec.kind) {
    case FeatureKind::kNodeLabelsOneHot: {
      std::set<int> distinct;
      for (const auto& g : ds.graphs) distinct.insert(g.node_labels.begin(), g.node_labels.end());
      std::map<int, std::size_t> index;
      for (int l : distinct) index.emplace(l, index.size());
      for (auto& g : ds.graphs) {
        DenseMatrix x(static_cast<std::size_t>(g.num_nodes), index.size());
        for (std::size_t v = 0; v < g.node_labels.size(); ++v) x(v, index.at(g.node_labels[v])) = 1.0;
        g.features = std::move(x);
      }
      break;
    }
    case FeatureKind::kDegreeOneHot: {
      if (spec.cap <= 0) {
        int max_deg = 1;
        for (const auto& g : ds.graphs) {
          for (int d : degrees(g)) max_deg = std::max(max_deg, d);
        }
        spec.cap = max_deg;
      }
      for (auto& g : ds.graphs) g.features = degree_features(g, spec.cap);
      break;
    }
    case FeatureKind::kConstant:
      for (auto& g : ds.graphs) g.features = DenseMatrix(static_cast<std::size_t>(g.num_nodes), 1, 1.0);
      break;
  }
  ds.feature_spec = spec;
}

GraphDataset load_tud_dataset(const fs::path& root_dir, const std::string& name, FeatureSpec spec) {
  const fs::path base = root_dir;
  const auto file = [&](const std::string& suffix) { return base / (name + "_" + suffix + ".txt"); };

  // Mandatory files are checked up front so the error names the first missing one.
  for (const char* s : {"A", "graph_indicator", "graph_labels"}) {
    if (!fs::exists(file(s))) throw IngestionError("missing file " + file(s).string());
  }
  const auto indicator = read_column(file("graph_indicator"), true);
  const auto graph_labels = read_column(file("graph_labels"), true);
  const auto node_labels = read_column(file("node_labels"), false);
  const std::size_t num_graphs = graph_labels.size();

  if (!node_labels.empty() && node_labels.size() != indicator.size()) {
    throw FormatError(name + "_node_labels.txt has " + std::to_string(node_labels.size()) +
                      " rows for " + std::to_string(indicator.size()) + " nodes");
  }

  // Nodes of a graph are contiguous in the indicator file.
  std::vector<std::size_t> first_node(num_graphs + 1, 0);
  std::vector<int> node_count(num_graphs, 0);
  for (std::size_t k = 0; k < indicator.size(); ++k) {
    const long gid = indicator[k];
    if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs) {
      throw FormatError(name + "_graph_indicator.txt:" + std::to_string(k + 1) + ": graph id " +
                        std::to_string(gid) + " outside [1, " + std::to_string(num_graphs) + "]");
    }
    if (k > 0 && gid < indicator[k - 1]) {
      throw FormatError(name + "_graph_indicator.txt:" + std::to_string(k + 1) +
                        ": graph ids must be non-decreasing");
    }
    ++node_count[static_cast<std::size_t>(gid - 1)];
  }
  for (std::size_t g = 0; g < num_graphs; ++g) first_node[g + 1] = first_node[g] + static_cast<std::size_t>(node_count[g]);

  std::vector<std::set<std::pair<int, int>>> directed(num_graphs);
  {
    const auto path = file("A");
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto v = parse_ints(line, path, lineno);
      if (v.empty()) continue;
      const auto where = name + "_A.txt:" + std::to_string(lineno);
      if (v.size() != 2) throw FormatError(where + ": expected two node ids");
      const long i = v[0], j = v[1];
      if (i < 1 || j < 1 || static_cast<std::size_t>(i) > indicator.size() ||
          static_cast<std::size_t>(j) > indicator.size()) {
        throw FormatError(where + ": node id outside [1, " + std::to_string(indicator.size()) + "]");
      }
      const long gi = indicator[static_cast<std::size_t>(i - 1)];
      const long gj = indicator[static_cast<std::size_t>(j - 1)];
      if (gi != gj) {
        throw FormatError(where + ": edge (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") references a node outside its graph");
      }
      if (i == j) throw FormatError(where + ": self-loop on node " + std::to_string(i));
      const auto g = static_cast<std::size_t>(gi - 1);
      const int li = static_cast<int>(static_cast<std::size_t>(i - 1) - first_node[g]);
      const int lj = static_cast<int>(static_cast<std::size_t>(j - 1) - first_node[g]);
      directed[g].emplace(li, lj);
    }
  }

  std::set<long> distinct_labels(graph_labels.begin(), graph_labels.end());
  std::map<long, int> label_index;
  for (long l : distinct_labels) label_index.emplace(l, static_cast<int>(label_index.size()));

  GraphDataset ds;
  ds.name = name;
  ds.num_classes = static_cast<int>(label_index.size());
  ds.graphs.reserve(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    std::vector<std::pair<int, int>> pairs;
    for (auto [a, b] : directed[g]) {
      if (!directed[g].count({b, a})) {
        throw FormatError(name + "_A.txt: edge (" + std::to_string(first_node[g] + a + 1) + ", " +
                          std::to_string(first_node[g] + b + 1) + ") has no reverse row");
      }
      if (a < b) pairs.emplace_back(a, b);
    }
    Graph graph = make_graph(node_count[g], pairs, {}, label_index.at(graph_labels[g]));
    graph.id = static_cast<int>(g);
    if (!node_labels.empty()) {
      graph.node_labels.assign(node_labels.begin() + static_cast<std::ptrdiff_t>(first_node[g]),
                               node_labels.begin() + static_cast<std::ptrdiff_t>(first_node[g + 1]));
    }
    ds.graphs.push_back(std::move(graph));
  }
  encode_features(ds, spec);
  validate_dataset(ds);
  return ds;
}

void write_tud_dataset(const GraphDataset& ds, const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ostringstream a, ind, gl, nl;
  const bool have_labels = std::all_of(ds.graphs.begin(), ds.graphs.end(), [](const Graph& g) {
    return static_cast<int>(g.node_labels.size()) == g.num_nodes;
  });
  std::size_t offset = 0;
  for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
    const auto& g = ds.graphs[gi];
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    for (const auto& e : g.edges) {
      rows.emplace_back(offset + static_cast<std::size_t>(e.u) + 1, offset + static_cast<std::size_t>(e.v) + 1);
      rows.emplace_back(offset + static_cast<std::size_t>(e.v) + 1, offset + static_cast<std::size_t>(e.u) + 1);
    }
    std::sort(rows.begin(), rows.end());
    for (auto [i, j] : rows) a << i << ", " << j << '\n';
    for (int v = 0; v < g.num_nodes; ++v) {
      ind << gi + 1 << '\n';
      if (have_labels) nl << g.node_labels[static_cast<std::size_t>(v)] << '\n';
    }
    gl << g.label << '\n';
    offset += static_cast<std::size_t>(g.num_nodes);
  }
  write_file_atomic(dir / (name + "_A.txt"), a.str());
  write_file_atomic(dir / (name + "_graph_indicator.txt"), ind.str());
  write_file_atomic(dir / (name + "_graph_labels.txt"), gl.str());
  if (have_labels && !ds.graphs.empty()) write_file_atomic(dir / (name + "_node_labels.txt"), nl.str());
}

}  // namespace sgx
