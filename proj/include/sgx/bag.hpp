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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgx/graph.hpp"

namespace sgx {

// Per-undirected-edge selection over one base graph. `bits` is the hard mask
// that reaches the classifier; `soft` holds the relaxed weights it was
// binarized from (empty for deterministic policies).
struct EdgeMask {
  std::vector<double> soft;
  std::vector<std::uint8_t> bits;
  double threshold_used = 0.5;
  std::optional<int> budget;
  std::optional<std::uint64_t> seed;
  // Node-deleted subgraphs zero this node's feature row and exclude it from
  // pooling; the node slot itself is kept.
  std::optional<int> deleted_node;

  std::size_t size() const { return bits.size(); }
  int count() const;
  bool operator==(const EdgeMask&) const = default;
};

enum class PolicyTag { kEdgeDeleted, kNodeDeleted, kExplainNoise, kExplainTopK, kFull };

std::string to_string(PolicyTag tag);
PolicyTag policy_from_string(const std::string& s);

// Ordered collection of subgraphs of one base graph. `base` is non-owning and
// must outlive the bag.
struct SubgraphBag {
  const Graph* base = nullptr;
  std::vector<EdgeMask> masks;
  PolicyTag policy = PolicyTag::kFull;

  std::size_t size() const { return masks.size(); }
};

// Throws DimensionError / DataError if masks do not fit the base graph.
void validate_bag(const SubgraphBag& bag);

EdgeMask full_mask(const Graph& g);
SubgraphBag singleton_bag(const Graph& g);

// Bag of |E| subgraphs; subgraph k drops edge k only.
SubgraphBag policy_edge_deleted(const Graph& g);
// Bag of n subgraphs; subgraph v drops every edge incident to v and zeroes
// its features.
SubgraphBag policy_node_deleted(const Graph& g);

// Uniform sample without replacement of ceil(fraction * m) masks, kept in
// original order. Deterministic in `seed`.
SubgraphBag sample_bag(const SubgraphBag& bag, double fraction, std::uint64_t seed);

// JSON wire form: {graph_id, policy, masks: [{bits: base64 bitset, K, seed}]}.
// Bits are packed LSB-first, eight edges per byte.
nlohmann::json bag_to_json(const SubgraphBag& bag);
SubgraphBag bag_from_json(const nlohmann::json& j, const Graph& base);

std::string encode_bits(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> decode_bits(const std::string& encoded, std::size_t num_bits);

}  // namespace sgx
