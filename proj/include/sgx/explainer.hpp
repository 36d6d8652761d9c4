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
#include <span>
#include <vector>

#include "sgx/backbone.hpp"
#include "sgx/bag.hpp"
#include "sgx/graph.hpp"
#include "sgx/optim.hpp"
#include "sgx/tensor.hpp"

namespace sgx {

// Edge scorer: linear(2h -> h) + ReLU + linear(h -> 1) on [z_u ; z_v].
struct ExplainerParams {
  Tensor w1, b1, w2, b2;

  static ExplainerParams init(std::size_t hidden, std::uint64_t seed);
  static ExplainerParams zeros(std::size_t hidden);
  NamedTensors named() const;
  ExplainerParams clone() const;
};

struct ExplainerConfig {
  double temperature_start = 5.0;
  double temperature_end = 1.0;
  double sparsity_weight = 0.1;  // lambda
  double noise_scale = 1.0;
  double threshold = 0.5;
  int bag_size = 10;
  std::vector<double> fractions{0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75};
  int epochs = 30;
  int batch_size = 32;
  AdamConfig adam{3e-3};
  std::uint64_t seed = 0;

  // Temperature for `epoch` under linear annealing from start to end.
  double temperature_at(int epoch) const;
  // Throws ArgumentError if any field is out of range.
  void validate() const;
};

// One logit per undirected edge k = (u, v), u < v: MLP([z_u ; z_v]).
Tensor edge_logits(const Tensor& z, std::span<const Edge> edges, const ExplainerParams& p);
Tensor edge_logits(const Tensor& z, const Graph& g, const ExplainerParams& p);

// Standard logistic draws log u - log(1 - u), u ~ U(0, 1), one per edge.
std::vector<double> logistic_noise(std::size_t n, std::uint64_t seed);

// Binary concrete relaxation sigmoid((omega + noise_scale * logistic) / tau),
// differentiable in omega. Throws ArgumentError for tau <= 0.
Tensor concrete_sample(const Tensor& omega, double tau, double noise_scale, std::uint64_t seed);

// Hard mask 1{s > threshold} whose backward is the identity into `s`.
Tensor binarize_ste(const Tensor& s, double threshold);

// 1 on the K largest entries of `s` (ties to the lower index). Throws
// ArgumentError unless 1 <= K <= |s|.
std::vector<std::uint8_t> topk_bits(std::span<const double> s, int k);
// Hard top-K mask with the same straight-through backward as binarize_ste.
Tensor topk_binarize(const Tensor& s, int k);

// Packs hard values (and the soft weights they came from) as an EdgeMask.
EdgeMask to_edge_mask(const Tensor& s, const Tensor& hard, double threshold);

// Cross-entropy of the masked prediction against the backbone's label plus
// lambda times the fraction of kept edges, averaged over graphs.
// `edge_mean` is the batch's [B x |E|] per-graph edge averaging operator.
Tensor explainer_loss(const Tensor& masked_logits, std::span<const int> targets, const Tensor& e,
                      const SparseMatrix& edge_mean, double lambda);
Tensor explainer_loss(const Tensor& masked_logits, int target, const Tensor& e, double lambda);

struct ExplainerTrainResult {
  ExplainerParams params;
  History history;  // loss and agreement with the backbone label per epoch
};

// Trains one shared explainer on the `train` graphs against the frozen
// backbone's own predictions. Deterministic in cfg.seed.
ExplainerTrainResult train_explainer(const GraphDataset& ds, std::span<const int> train,
                                     const BackboneParams& backbone, const ExplainerConfig& cfg,
                                     Audit* audit = nullptr);

// Deterministic edge probabilities sigmoid(omega / tau) for one graph.
std::vector<double> edge_probabilities(const Graph& g, const BackboneParams& backbone,
                                       const ExplainerParams& explainer, double tau);

// m masks from independent concrete draws thresholded at `threshold`.
SubgraphBag generate_bag_noise(const Graph& g, const BackboneParams& backbone,
                               const ExplainerParams& explainer, int m, double noise_scale,
                               double threshold, double tau, std::uint64_t seed);
SubgraphBag generate_bag_noise(const Graph& g, const BackboneParams& backbone,
                               const ExplainerParams& explainer, const ExplainerConfig& cfg);

// One top-K mask per fraction, K = max(1, ceil(f |E|)), on deterministic
// weights. Masks are nested for ascending fractions.
SubgraphBag generate_bag_topk(const Graph& g, const BackboneParams& backbone,
                              const ExplainerParams& explainer, std::span<const double> fractions,
                              double tau = 1.0);

}  // namespace sgx
