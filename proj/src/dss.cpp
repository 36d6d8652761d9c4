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

#include "sgx/dss.hpp"

#include <cmath>
#include <random>

#include "sgx/errors.hpp"
#include "sgx/ops.hpp"
#include "sgx/seed.hpp"

namespace sgx {
namespace {

Tensor clone_param(const Tensor& t) {
  Tensor c = t.clone();
  c.set_requires_grad(true);
  return c;
}

std::vector<const SubgraphBag*> pick_bags(std::span<const SubgraphBag> bags, std::span<const int> idx) {
  std::vector<const SubgraphBag*> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(&bags[static_cast<std::size_t>(i)]);
  return out;
}

int count_correct(const Tensor& logits, std::span<const int> labels) {
  int correct = 0;
  const std::size_t c = logits.cols();
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (predict_from_logits(logits.values().subspan(r * c, c)).label == labels[r]) ++correct;
  }
  return correct;
}

}  // namespace

DssParams DssParams::init(const BackboneParams& backbone, int num_classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DssParams p;
  for (const auto& layer : backbone.layers) {
    p.l1.push_back(layer.clone());
    p.l2.push_back(GinLayerParams::init(layer.in_dim(), layer.w2.cols(), rng));
  }
  const std::size_t h = backbone.head_w.rows();
  p.phi_w = init_uniform(h, h, h, rng);
  p.phi_b = init_uniform(1, h, h, rng);
  p.rho_w = init_uniform(h, h, h, rng);
  p.rho_b = init_uniform(1, h, h, rng);
  p.head_w = init_uniform(h, static_cast<std::size_t>(num_classes), h, rng);
  p.head_b = init_uniform(1, static_cast<std::size_t>(num_classes), h, rng);
  return p;
}

NamedTensors DssParams::named() const {
  NamedTensors out;
  for (std::size_t l = 0; l < l1.size(); ++l) {
    auto n = l1[l].named("L1/layer" + std::to_string(l) + "/");
    out.insert(out.end(), n.begin(), n.end());
  }
  for (std::size_t l = 0; l < l2.size(); ++l) {
    auto n = l2[l].named("L2/layer" + std::to_string(l) + "/");
    out.insert(out.end(), n.begin(), n.end());
  }
  out.emplace_back("set/phi_w", phi_w);
  out.emplace_back("set/phi_b", phi_b);
  out.emplace_back("set/rho_w", rho_w);
  out.emplace_back("set/rho_b", rho_b);
  out.emplace_back("head/w", head_w);
  out.emplace_back("head/b", head_b);
  return out;
}

DssParams DssParams::clone() const {
  DssParams p;
  for (const auto& l : l1) p.l1.push_back(l.clone());
  for (const auto& l : l2) p.l2.push_back(l.clone());
  p.phi_w = clone_param(phi_w);
  p.phi_b = clone_param(phi_b);
  p.rho_w = clone_param(rho_w);
  p.rho_b = clone_param(rho_b);
  p.head_w = clone_param(head_w);
  p.head_b = clone_param(head_b);
  return p;
}

AggregateView aggregate_bags(std::span<const SubgraphBag* const> parts) {
  if (parts.empty()) throw DataError("no bags to aggregate");
  const Graph* base = parts.front()->base;
  for (const auto* b : parts) {
    if (b->base != base) throw DataError("cannot aggregate bags over different base graphs");
    validate_bag(*b);
  }
  const auto n = static_cast<std::size_t>(base->num_nodes);
  AggregateView view{DenseMatrix(n, base->features.cols), {}};
  std::vector<double> multiplicity(base->num_edges(), 0.0);
  for (const auto* b : parts) {
    for (const auto& m : b->masks) {
      for (std::size_t v = 0; v < n; ++v) {
        if (m.deleted_node && static_cast<std::size_t>(*m.deleted_node) == v) continue;
        for (std::size_t c = 0; c < view.features.cols; ++c) view.features(v, c) += base->features(v, c);
      }
      for (std::size_t k = 0; k < m.bits.size(); ++k) multiplicity[k] += m.bits[k];
    }
  }
  std::vector<SparseMatrix::Entry> entries;
  for (std::size_t k = 0; k < multiplicity.size(); ++k) {
    if (multiplicity[k] == 0.0) continue;
    entries.push_back({base->edges[k].u, base->edges[k].v, multiplicity[k]});
    entries.push_back({base->edges[k].v, base->edges[k].u, multiplicity[k]});
  }
  view.adjacency = SparseMatrix(n, n, entries);
  return view;
}

AggregateView aggregate_bag(const SubgraphBag& bag) {
  const SubgraphBag* p = &bag;
  return aggregate_bags(std::span<const SubgraphBag* const>(&p, 1));
}

Tensor dss_layer(const Tensor& copy_states, const BagBatch& batch, const GinLayerParams& l1,
                 const GinLayerParams& l2) {
  if (copy_states.rows() != batch.copy_rows) {
    throw DimensionError("dss_layer: " + std::to_string(copy_states.rows()) + " state rows for " +
                         std::to_string(batch.copy_rows) + " subgraph nodes");
  }
  Tensor agg = ops::spmm(batch.gather, copy_states);
  Tensor shared = gin_update(agg, ops::spmm(batch.agg_adjacency, agg), l2);
  Tensor own = gin_update(copy_states, ops::spmm(batch.copy_adjacency, copy_states), l1);
  return ops::add(own, ops::spmm(batch.broadcast, shared));
}

DssLayerOutput dss_layer(std::span<const Tensor> bag_states, const SubgraphBag& bag,
                         const GinLayerParams& l1, const GinLayerParams& l2) {
  if (bag_states.size() != bag.size()) {
    throw DimensionError("dss_layer: " + std::to_string(bag_states.size()) + " states for a bag of " +
                         std::to_string(bag.size()));
  }
  const SubgraphBag* p = &bag;
  const BagBatch batch = make_bag_batch(std::span<const SubgraphBag* const>(&p, 1));
  const auto n = static_cast<std::size_t>(bag.base->num_nodes);
  const std::size_t w = bag_states.empty() ? 0 : bag_states.front().cols();
  std::vector<double> stacked;
  stacked.reserve(batch.copy_rows * w);
  for (const auto& s : bag_states) {
    if (s.rows() != n || s.cols() != w) throw DimensionError("dss_layer: subgraph states must share n and width");
    stacked.insert(stacked.end(), s.values().begin(), s.values().end());
  }
  Tensor next = dss_layer(Tensor::from(batch.copy_rows, w, std::move(stacked)), batch, l1, l2);
  DssLayerOutput out;
  const std::size_t q = next.cols();
  for (std::size_t i = 0; i < bag.size(); ++i) {
    const auto part = next.values().subspan(i * n * q, n * q);
    out.bag_states.push_back(Tensor::from(n, q, {part.begin(), part.end()}));
  }
  out.agg_state = ops::spmm(batch.gather, next);
  return out;
}

DssOutput dss_forward(const BagBatch& batch, const DssParams& p) {
  if (p.l1.size() != p.l2.size()) throw DimensionError("L1 and L2 must have the same depth");
  Tensor h = batch.copy_features;
  for (std::size_t l = 0; l < p.l1.size(); ++l) h = dss_layer(h, batch, p.l1[l], p.l2[l]);
  DssOutput out;
  out.subgraph_embeddings = ops::spmm(batch.pool, h);
  Tensor phi = ops::relu(ops::linear(out.subgraph_embeddings, p.phi_w, p.phi_b));
  Tensor pooled = ops::spmm(batch.set_mean, phi);
  out.graph_embeddings = ops::relu(ops::linear(pooled, p.rho_w, p.rho_b));
  out.logits = ops::linear(out.graph_embeddings, p.head_w, p.head_b);
  return out;
}

DssOutput dss_forward(const SubgraphBag& bag, const DssParams& p) {
  const SubgraphBag* b = &bag;
  return dss_forward(make_bag_batch(std::span<const SubgraphBag* const>(&b, 1)), p);
}

double evaluate_dss(std::span<const SubgraphBag> bags, std::span<const int> idx, const DssParams& p,
                    int batch_size) {
  if (idx.empty()) return 0.0;
  FrozenScope frozen(p.named());
  int correct = 0;
  for (std::size_t i = 0; i < idx.size(); i += static_cast<std::size_t>(batch_size)) {
    const auto part = idx.subspan(i, std::min(idx.size() - i, static_cast<std::size_t>(batch_size)));
    const auto chosen = pick_bags(bags, part);
    const BagBatch b = make_bag_batch(chosen);
    correct += count_correct(dss_forward(b, p).logits, b.labels);
  }
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

DssTrainResult finetune_dss(const GraphDataset& ds, std::span<const SubgraphBag> bags,
                            std::span<const int> train, std::span<const int> val,
                            const BackboneParams& init, const DssTrainConfig& cfg, Audit* audit) {
  if (bags.size() != ds.size()) {
    throw DataError("expected one bag per graph, got " + std::to_string(bags.size()) + " for " +
                    std::to_string(ds.size()) + " graphs");
  }
  if (train.empty()) throw DataError("fine-tuning split is empty");
  for (int i : train) {
    if (bags[static_cast<std::size_t>(i)].masks.empty()) {
      throw DataError("empty bag for graph " + std::to_string(ds.graphs[static_cast<std::size_t>(i)].id));
    }
  }
  for (int i : val) {
    if (bags[static_cast<std::size_t>(i)].masks.empty()) {
      throw DataError("empty bag for graph " + std::to_string(ds.graphs[static_cast<std::size_t>(i)].id));
    }
  }
  DssTrainResult res{DssParams::init(init, init.num_classes(), derive_seed({cfg.seed, 11})), {}};
  Adam opt(res.params.named(), cfg.adam);
  std::mt19937_64 rng(derive_seed({cfg.seed, 12}));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    int correct = 0;
    for (const auto& mb : make_minibatches(train, cfg.batch_size, rng)) {
      std::vector<SubgraphBag> sampled;
      sampled.reserve(mb.size());
      for (int i : mb) {
        const auto& bag = bags[static_cast<std::size_t>(i)];
        if (cfg.bag_fraction < 1.0) {
          sampled.push_back(sample_bag(bag, cfg.bag_fraction,
                                       derive_seed({cfg.seed, 13, static_cast<std::uint64_t>(epoch),
                                                    static_cast<std::uint64_t>(i)})));
        } else {
          sampled.push_back(bag);
        }
        if (audit) audit->insert(bag.base->id);
      }
      std::vector<const SubgraphBag*> ptrs;
      for (const auto& b : sampled) ptrs.push_back(&b);
      const BagBatch b = make_bag_batch(ptrs);
      const auto out = dss_forward(b, res.params);
      Tensor loss = ops::softmax_cross_entropy(out.logits, b.labels);
      if (!std::isfinite(loss.item())) {
        throw TrainingError("non-finite fine-tuning loss at epoch " + std::to_string(epoch));
      }
      opt.zero_grad();
      backward(loss);
      opt.step();
      loss_sum += loss.item() * static_cast<double>(mb.size());
      correct += count_correct(out.logits, b.labels);
    }
    EpochRecord rec{epoch, loss_sum / static_cast<double>(train.size()),
                    static_cast<double>(correct) / static_cast<double>(train.size()), std::nullopt};
    if (!val.empty()) rec.val_acc = evaluate_dss(bags, val, res.params);
    res.history.push_back(rec);
  }
  return res;
}

}  // namespace sgx
