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
#include "sgx/batch.hpp"
#include "sgx/graph.hpp"
#include "sgx/sparse.hpp"

namespace sgx {

// DSS encoder over a bag of m subgraphs. Layer l updates every subgraph state as
//   H_i <- L1_l(H_i on subgraph i) + L2_l((1/m) sum_j H_j on the aggregate graph)
// where the aggregate graph carries edge multiplicities divided by m. Then
// per-subgraph sum pooling, a DeepSets set module rho((1/m) sum_i phi(h_i))
// and a linear head. For a singleton bag the 1/m factors vanish.
struct DssParams {
  std::vector<GinLayerParams> l1;  // fine-tuned from the step-1 backbone
  std::vector<GinLayerParams> l2;  // information-sharing layers
  Tensor phi_w, phi_b, rho_w, rho_b;
  Tensor head_w, head_b;

  // L1 copied from `backbone`; L2, set module and head freshly initialized.
  static DssParams init(const BackboneParams& backbone, int num_classes, std::uint64_t seed);
  // Checkpoint names under L1/, L2/, set/ and head/.
  NamedTensors named() const;
  DssParams clone() const;
};

// Sum of the bag's subgraphs: node features summed over subgraphs (deleted
// rows contribute zeros) and adjacency weighted by edge multiplicity.
struct AggregateView {
  DenseMatrix features;
  SparseMatrix adjacency;
};

AggregateView aggregate_bag(const SubgraphBag& bag);
// Throws DataError when the bags do not share one base graph.
AggregateView aggregate_bags(std::span<const SubgraphBag* const> parts);

// One DSS layer on stacked subgraph states [copy_rows x w].
Tensor dss_layer(const Tensor& copy_states, const BagBatch& batch, const GinLayerParams& l1,
                 const GinLayerParams& l2);

struct DssLayerOutput {
  std::vector<Tensor> bag_states;  // one [n x hidden] tensor per subgraph
  Tensor agg_state;                // mean of the new states
};
// Single-bag convenience form over per-subgraph states.
DssLayerOutput dss_layer(std::span<const Tensor> bag_states, const SubgraphBag& bag,
                         const GinLayerParams& l1, const GinLayerParams& l2);

struct DssOutput {
  Tensor logits;                 // [B x c]
  Tensor subgraph_embeddings;    // [num_subgraphs x hidden]
  Tensor graph_embeddings;       // [B x hidden], input of the head
};

DssOutput dss_forward(const BagBatch& batch, const DssParams& p);
DssOutput dss_forward(const SubgraphBag& bag, const DssParams& p);

struct DssTrainConfig {
  int epochs = 100;
  int batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 0;
  // Fraction of each bag used per training epoch; resampled every epoch.
  double bag_fraction = 1.0;
};

struct DssTrainResult {
  DssParams params;
  History history;
};

// `bags[i]` is the bag of ds.graphs[i]. Validation graphs are evaluated on
// their full bags after every epoch.
DssTrainResult finetune_dss(const GraphDataset& ds, std::span<const SubgraphBag> bags,
                            std::span<const int> train, std::span<const int> val,
                            const BackboneParams& init, const DssTrainConfig& cfg,
                            Audit* audit = nullptr);

double evaluate_dss(std::span<const SubgraphBag> bags, std::span<const int> idx, const DssParams& p,
                    int batch_size = 32);

}  // namespace sgx
