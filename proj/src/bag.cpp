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

#include "sgx/bag.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/escaping.h"
#include "sgx/errors.hpp"

namespace sgx {

int EdgeMask::count() const {
  return static_cast<int>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::string to_string(PolicyTag tag) {
  switch (tag) {
    case PolicyTag::kEdgeDeleted: return "ED";
    case PolicyTag::kNodeDeleted: return "ND";
    case PolicyTag::kExplainNoise: return "EXPLAIN_NOISE";
    case PolicyTag::kExplainTopK: return "EXPLAIN_TOPK";
    case PolicyTag::kFull: return "FULL";
  }
  return "?";
}

PolicyTag policy_from_string(const std::string& s) {
  if (s == "ED") return PolicyTag::kEdgeDeleted;
  if (s == "ND") return PolicyTag::kNodeDeleted;
  if (s == "EXPLAIN_NOISE") return PolicyTag::kExplainNoise;
  if (s == "EXPLAIN_TOPK") return PolicyTag::kExplainTopK;
  if (s == "FULL") return PolicyTag::kFull;
  throw FormatError("unknown bag policy '" + s + "'");
}

void validate_bag(const SubgraphBag& bag) {
  if (bag.base == nullptr) throw DataError("bag has no base graph");
  if (bag.masks.empty()) throw DataError("empty bag for graph " + std::to_string(bag.base->id));
  for (const auto& m : bag.masks) {
    if (m.bits.size() != bag.base->num_edges()) {
      throw DimensionError("mask length " + std::to_string(m.bits.size()) + " != " +
                           std::to_string(bag.base->num_edges()) + " edges of graph " +
                           std::to_string(bag.base->id));
    }
    if (m.deleted_node && (*m.deleted_node < 0 || *m.deleted_node >= bag.base->num_nodes)) {
      throw DimensionError("deleted node out of range");
    }
  }
}

EdgeMask full_mask(const Graph& g) {
  EdgeMask m;
  m.bits.assign(g.num_edges(), 1);
  return m;
}

SubgraphBag singleton_bag(const Graph& g) { return {&g, {full_mask(g)}, PolicyTag::kFull}; }

SubgraphBag policy_edge_deleted(const Graph& g) {
  if (g.edges.empty()) {
    throw PolicyError("edge-deleted policy needs at least one edge (graph " + std::to_string(g.id) + ")");
  }
  SubgraphBag bag{&g, {}, PolicyTag::kEdgeDeleted};
  bag.masks.reserve(g.num_edges());
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    EdgeMask m = full_mask(g);
    m.bits[k] = 0;
    bag.masks.push_back(std::move(m));
  }
  return bag;
}

SubgraphBag policy_node_deleted(const Graph& g) {
  if (g.num_nodes < 1) throw PolicyError("node-deleted policy needs at least one node");
  SubgraphBag bag{&g, {}, PolicyTag::kNodeDeleted};
  bag.masks.reserve(static_cast<std::size_t>(g.num_nodes));
  for (int v = 0; v < g.num_nodes; ++v) {
    EdgeMask m = full_mask(g);
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      if (g.edges[k].u == v || g.edges[k].v == v) m.bits[k] = 0;
    }
    m.deleted_node = v;
    bag.masks.push_back(std::move(m));
  }
  return bag;
}

SubgraphBag sample_bag(const SubgraphBag& bag, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ArgumentError("bag fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  if (bag.masks.empty()) throw ArgumentError("cannot sample from an empty bag");
  const std::size_t m = bag.masks.size();
  // Guard against 0.1 * 30 = 3.0000000000000004 style rounding.
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m) - 1e-9));
  if (keep >= m) return bag;
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `keep` slots are the sample.
  for (std::size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(std::max<std::size_t>(keep, 1));
  std::sort(idx.begin(), idx.end());
  SubgraphBag out{bag.base, {}, bag.policy};
  out.masks.reserve(idx.size());
  for (auto i : idx) out.masks.push_back(bag.masks[i]);
  return out;
}

std::string encode_bits(const std::vector<std::uint8_t>& bits) {
  std::string packed((bits.size() + 7) / 8, '\0');
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) packed[k / 8] = static_cast<char>(packed[k / 8] | (1 << (k % 8)));
  }
  return absl::Base64Escape(packed);
}

std::vector<std::uint8_t> decode_bits(const std::string& encoded, std::size_t num_bits) {
  std::string packed;
  if (!absl::Base64Unescape(encoded, &packed)) throw FormatError("invalid base64 bitset");
  if (packed.size() != (num_bits + 7) / 8) {
    throw FormatError("bitset holds " + std::to_string(packed.size() * 8) + " bits, expected " +
                      std::to_string(num_bits));
  }
  std::vector<std::uint8_t> bits(num_bits);
  for (std::size_t k = 0; k < num_bits; ++k) bits[k] = (static_cast<unsigned char>(packed[k / 8]) >> (k % 8)) & 1u;
  return bits;
}

nlohmann::json bag_to_json(const SubgraphBag& bag) {
  validate_bag(bag);
  nlohmann::json j;
  j["graph_id"] = bag.base->id;
  j["policy"] = to_string(bag.policy);
  j["masks"] = nlohmann::json::array();
  for (const auto& m : bag.masks) {
    nlohmann::json mj;
    mj["bits"] = encode_bits(m.bits);
    mj["K"] = m.budget ? nlohmann::json(*m.budget) : nlohmann::json(nullptr);
    mj["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
    if (m.deleted_node) mj["node"] = *m.deleted_node;
    j["masks"].push_back(std::move(mj));
  }
  return j;
}

SubgraphBag bag_from_json(const nlohmann::json& j, const Graph& base) {
  if (j.at("graph_id").get<int>() != base.id) {
    throw FormatError("bag graph_id " + std::to_string(j.at("graph_id").get<int>()) +
                      " does not match graph " + std::to_string(base.id));
  }
  SubgraphBag bag{&base, {}, policy_from_string(j.at("policy").get<std::string>())};
  for (const auto& mj : j.at("masks")) {
    EdgeMask m;
    m.bits = decode_bits(mj.at("bits").get<std::string>(), base.num_edges());
    if (mj.contains("K") && !mj["K"].is_null()) m.budget = mj["K"].get<int>();
    if (mj.contains("seed") && !mj["seed"].is_null()) m.seed = mj["seed"].get<std::uint64_t>();
    if (mj.contains("node")) m.deleted_node = mj["node"].get<int>();
    bag.masks.push_back(std::move(m));
  }
  validate_bag(bag);
  return bag;
}

}  // namespace sgx
