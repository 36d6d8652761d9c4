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
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sgx/bag.hpp"
#include "sgx/batch.hpp"
#include "sgx/graph.hpp"
#include "sgx/optim.hpp"
#include "sgx/tensor.hpp"

namespace sgx {

inline constexpr std::size_t kHidden = 32;
inline constexpr std::size_t kGinLayers = 4;

// One GIN layer: MLP((1 + eps) h + sum of neighbour states), where the MLP is
// linear -> ReLU -> linear followed by the outer ReLU.
struct GinLayerParams {
  Tensor w1, b1, w2, b2, eps;

  static GinLayerParams init(std::size_t in_dim, std::size_t hidden, std::mt19937_64& rng);
  static GinLayerParams zeros(std::size_t in_dim, std::size_t hidden);
  NamedTensors named(const std::string& prefix) const;
  GinLayerParams clone() const;
  std::size_t in_dim() const { return w1.rows(); }
};

struct BackboneParams {
  std::vector<GinLayerParams> layers;
  Tensor head_w, head_b;

  static BackboneParams init(std::size_t in_dim, int num_classes, std::uint64_t seed,
                             std::size_t hidden = kHidden, std::size_t num_layers = kGinLayers);
  NamedTensors named() const;
  BackboneParams clone() const;
  int num_classes() const { return static_cast<int>(head_w.cols()); }
};

// Applies the layer MLP to (1 + eps) h + aggregated.
Tensor gin_update(const Tensor& h, const Tensor& aggregated, const GinLayerParams& p);

// Single-graph layer. With a mask, dropped edges do not carry messages.
Tensor gin_layer(const Tensor& h, const Graph& g, const EdgeMask* mask, const GinLayerParams& p);

struct BackboneOutput {
  Tensor node_embeddings;   // last layer states [N x hidden]
  Tensor graph_embeddings;  // sum pooled [B x hidden]
  Tensor logits;            // [B x c]
};

// Batched forward. With `edge_weights` ([|E| x 1]) messages are weighted by
// that tensor instead of the batch's hard adjacency, which lets gradients
// reach the mask.
BackboneOutput backbone_forward(const GraphBatch& batch, const BackboneParams& p,
                                const Tensor* edge_weights = nullptr);
BackboneOutput backbone_forward(const Graph& g, const EdgeMask* mask, const BackboneParams& p);

struct Prediction {
  int label = 0;
  std::vector<double> probs;
};

// argmax of softmax; ties go to the lower class index.
Prediction predict_from_logits(std::span<const double> logits);
Prediction predict(const Graph& g, const BackboneParams& p);

struct TrainConfig {
  int epochs = 350;
  int batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  std::optional<double> val_acc;
};
using History = std::vector<EpochRecord>;

// One JSON object per line: {"epoch", "train_acc", "val_acc", "loss"}.
std::string history_to_jsonl(const History& h);

// Graph ids touched by a training stage.
using Audit = std::set<int>;

struct BackboneTrainResult {
  BackboneParams params;
  History history;
};

// Minibatch cross-entropy training with Adam. Graphs listed in `val` are only
// evaluated (val_acc per epoch). Deterministic in cfg.seed.
BackboneTrainResult train_backbone(const GraphDataset& ds, std::span<const int> train,
                                   std::span<const int> val, const TrainConfig& cfg,
                                   Audit* audit = nullptr);
BackboneTrainResult train_backbone(const GraphDataset& ds, const TrainConfig& cfg);

// Accuracy of the backbone on the listed graphs.
double evaluate_backbone(const GraphDataset& ds, std::span<const int> idx, const BackboneParams& p,
                         int batch_size = 64);

// Shuffled minibatches of `idx`.
std::vector<std::vector<int>> make_minibatches(std::span<const int> idx, int batch_size,
                                               std::mt19937_64& rng);

}  // namespace sgx
