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

// Small hand-built graphs and independent oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "sgx/graph.hpp"
#include "sgx/tensor.hpp"

namespace sgx::testing {

inline Graph graph_of(int n, std::vector<std::pair<int, int>> pairs, int label = 0,
                      DenseMatrix features = {}) {
  return make_graph(n, pairs, std::move(features), label);
}

inline Graph triangle() { return graph_of(3, {{0, 1}, {1, 2}, {0, 2}}); }
inline Graph single_edge() { return graph_of(2, {{0, 1}}); }

inline Graph path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return graph_of(n, e);
}

inline Graph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return graph_of(n, e);
}

inline Graph star(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return graph_of(leaves + 1, e);
}

inline Graph two_triangles() {
  return graph_of(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

// Connected random graph on n nodes (a random tree plus extra edges) with
// d-dimensional uniform features.
inline Graph random_graph(int n, int extra_edges, std::size_t d, std::mt19937_64& rng, int label = 0) {
  std::vector<std::pair<int, int>> e;
  for (int v = 1; v < n; ++v) {
    e.emplace_back(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
  }
  std::uniform_int_distribution<int> node(0, n - 1);
  for (int t = 0; t < 50 * extra_edges && extra_edges > 0; ++t) {
    int a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (std::find(e.begin(), e.end(), std::make_pair(a, b)) != e.end()) continue;
    if (std::find(e.begin(), e.end(), std::make_pair(b, a)) != e.end()) continue;
    e.emplace_back(a, b);
    if (--extra_edges == 0) break;
  }
  DenseMatrix x(static_cast<std::size_t>(n), d);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x.data) v = u(rng);
  return graph_of(n, e, label, x);
}

// Brute-force 1-WL colour refinement run jointly on both graphs until the
// partition stops changing. Returns true when the final colour histograms
// agree, i.e. 1-WL cannot tell the graphs apart. Initial colours come from
// the node feature rows.
inline bool wl_equivalent(const Graph& a, const Graph& b) {
  const Graph* gs[2] = {&a, &b};
  std::vector<std::vector<int>> colour(2);
  std::map<std::vector<double>, int> init;
  for (int i = 0; i < 2; ++i) {
    for (int v = 0; v < gs[i]->num_nodes; ++v) {
      const auto row = gs[i]->features.row(static_cast<std::size_t>(v));
      std::vector<double> key(row.begin(), row.end());
      auto [it, _] = init.emplace(key, static_cast<int>(init.size()));
      colour[static_cast<std::size_t>(i)].push_back(it->second);
    }
  }
  std::size_t classes = init.size();
  for (int round = 0; round < a.num_nodes + b.num_nodes + 1; ++round) {
    std::map<std::pair<int, std::vector<int>>, int> sig;
    std::vector<std::vector<int>> next(2);
    for (int i = 0; i < 2; ++i) {
      const Graph& g = *gs[i];
      std::vector<std::vector<int>> nb(static_cast<std::size_t>(g.num_nodes));
      for (const auto& e : g.edges) {
        nb[static_cast<std::size_t>(e.u)].push_back(colour[i][static_cast<std::size_t>(e.v)]);
        nb[static_cast<std::size_t>(e.v)].push_back(colour[i][static_cast<std::size_t>(e.u)]);
      }
      for (int v = 0; v < g.num_nodes; ++v) {
        auto& m = nb[static_cast<std::size_t>(v)];
        std::sort(m.begin(), m.end());
        auto [it, _] = sig.emplace(std::make_pair(colour[i][static_cast<std::size_t>(v)], m),
                                   static_cast<int>(sig.size()));
        next[static_cast<std::size_t>(i)].push_back(it->second);
      }
    }
    colour = std::move(next);
    if (sig.size() == classes) break;
    classes = sig.size();
  }
  auto hist = [](std::vector<int> c) {
    std::sort(c.begin(), c.end());
    return c;
  };
  return hist(colour[0]) == hist(colour[1]);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0, bool requires_grad = true) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(r * c);
  for (auto& x : v) x = u(rng);
  return Tensor::from(r, c, std::move(v), requires_grad);
}

}  // namespace sgx::testing
