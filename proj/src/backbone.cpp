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

#include "sgx/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "sgx/errors.hpp"
#include "sgx/ops.hpp"

namespace sgx {

GinLayerParams GinLayerParams::init(std::size_t in_dim, std::size_t hidden, std::mt19937_64& rng) {
  GinLayerParams p;
  p.w1 = init_uniform(in_dim, hidden, in_dim, rng);
  p.b1 = init_uniform(1, hidden, in_dim, rng);
  p.w2 = init_uniform(hidden, hidden, hidden, rng);
  p.b2 = init_uniform(1, hidden, hidden, rng);
  p.eps = Tensor::scalar(0.0, true);
  return p;
}

GinLayerParams GinLayerParams::zeros(std::size_t in_dim, std::size_t hidden) {
  return {Tensor::zeros(in_dim, hidden, true), Tensor::zeros(1, hidden, true),
          Tensor::zeros(hidden, hidden, true), Tensor::zeros(1, hidden, true),
          Tensor::scalar(0.0, true)};
}

NamedTensors GinLayerParams::named(const std::string& prefix) const {
  return {{prefix + "w1", w1}, {prefix + "b1", b1}, {prefix + "w2", w2},
          {prefix + "b2", b2}, {prefix + "eps", eps}};
}

namespace {
Tensor clone_param(const Tensor& t) {
  Tensor c = t.clone();
  c.set_requires_grad(true);
  return c;
}
}  // namespace

GinLayerParams GinLayerParams::clone() const {
  return {clone_param(w1), clone_param(b1), clone_param(w2), clone_param(b2), clone_param(eps)};
}

BackboneParams BackboneParams::init(std::size_t in_dim, int num_classes, std::uint64_t seed,
                                    std::size_t hidden, std::size_t num_layers) {
  if (num_classes < 2) throw ArgumentError("backbone needs at least 2 classes");
  std::mt19937_64 rng(seed);
  BackboneParams p;
  for (std::size_t l = 0; l < num_layers; ++l) {
    p.layers.push_back(GinLayerParams::init(l == 0 ? in_dim : hidden, hidden, rng));
  }
  p.head_w = init_uniform(hidden, static_cast<std::size_t>(num_classes), hidden, rng);
  p.head_b = init_uniform(1, static_cast<std::size_t>(num_classes), hidden, rng);
  return p;
}

NamedTensors BackboneParams::named() const {
  NamedTensors out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto n = layers[l].named("layer" + std::to_string(l) + "/");
    out.insert(out.end(), n.begin(), n.end());
  }
  out.emplace_back("head/w", head_w);
  out.emplace_back("head/b", head_b);
  return out;
}

BackboneParams BackboneParams::clone() const {
  BackboneParams p;
  for (const auto& l : layers) p.layers.push_back(l.clone());
  p.head_w = clone_param(head_w);
  p.head_b = clone_param(head_b);
  return p;
}

Tensor gin_update(const Tensor& h, const Tensor& aggregated, const GinLayerParams& p) {
  if (h.cols() != p.in_dim()) {
    throw DimensionError("gin layer expects width " + std::to_string(p.in_dim()) + ", got " +
                         std::to_string(h.cols()));
  }
  Tensor pre = ops::add(ops::one_plus_eps_scale(h, p.eps), aggregated);
  Tensor hidden = ops::relu(ops::linear(pre, p.w1, p.b1));
  return ops::relu(ops::linear(hidden, p.w2, p.b2));
}

Tensor gin_layer(const Tensor& h, const Graph& g, const EdgeMask* mask, const GinLayerParams& p) {
  if (h.rows() != static_cast<std::size_t>(g.num_nodes)) {
    throw DimensionError("gin_layer: " + std::to_string(h.rows()) + " state rows for " +
                         std::to_string(g.num_nodes) + " nodes");
  }
  const Graph* gp = &g;
  const EdgeMask* masks[1] = {mask};
  const GraphBatch b = make_graph_batch(std::span<const Graph* const>(&gp, 1),
                                        std::span<const EdgeMask* const>(masks, 1));
  return gin_update(h, ops::spmm(b.adjacency, h), p);
}

BackboneOutput backbone_forward(const GraphBatch& batch, const BackboneParams& p,
                                const Tensor* edge_weights) {
  if (!p.layers.empty() && batch.features.cols() != p.layers.front().in_dim()) {
    throw DimensionError("feature width " + std::to_string(batch.features.cols()) +
                         " does not match backbone input " + std::to_string(p.layers.front().in_dim()));
  }
  Tensor h = batch.features;
  for (const auto& layer : p.layers) {
    Tensor agg = edge_weights ? ops::spmm_weighted(batch.edge_pattern, *edge_weights, h)
                              : ops::spmm(batch.adjacency, h);
    h = gin_update(h, agg, layer);
  }
  BackboneOutput out;
  out.node_embeddings = h;
  out.graph_embeddings = ops::spmm(batch.pool, h);
  out.logits = ops::linear(out.graph_embeddings, p.head_w, p.head_b);
  return out;
}

BackboneOutput backbone_forward(const Graph& g, const EdgeMask* mask, const BackboneParams& p) {
  const Graph* gp = &g;
  const EdgeMask* masks[1] = {mask};
  const GraphBatch b = make_graph_batch(std::span<const Graph* const>(&gp, 1),
                                        std::span<const EdgeMask* const>(masks, 1));
  return backbone_forward(b, p);
}

Prediction predict_from_logits(std::span<const double> logits) {
  Prediction pr;
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  pr.probs.resize(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) z += (pr.probs[j] = std::exp(logits[j] - m));
  for (auto& v : pr.probs) v /= z;
  // max_element returns the first maximum, i.e. the lower class on ties.
  pr.label = static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
  return pr;
}

Prediction predict(const Graph& g, const BackboneParams& p) {
  FrozenScope frozen(p.named());
  return predict_from_logits(backbone_forward(g, nullptr, p).logits.values());
}

std::string history_to_jsonl(const History& h) {
  std::string out;
  for (const auto& r : h) {
    nlohmann::json j = {{"epoch", r.epoch}, {"train_acc", r.train_acc}, {"loss", r.loss}};
    j["val_acc"] = r.val_acc ? nlohmann::json(*r.val_acc) : nlohmann::json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<std::vector<int>> make_minibatches(std::span<const int> idx, int batch_size,
                                               std::mt19937_64& rng) {
  if (batch_size < 1) throw ArgumentError("batch size must be positive");
  std::vector<int> order(idx.begin(), idx.end());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(batch_size)) {
    const auto end = std::min(order.size(), i + static_cast<std::size_t>(batch_size));
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

namespace {

std::vector<const Graph*> pick(const GraphDataset& ds, std::span<const int> idx) {
  std::vector<const Graph*> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(&ds.graphs.at(static_cast<std::size_t>(i)));
  return out;
}

int count_correct(const Tensor& logits, std::span<const int> labels) {
  int correct = 0;
  const std::size_t c = logits.cols();
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto row = logits.values().subspan(r * c, c);
    if (predict_from_logits(row).label == labels[r]) ++correct;
  }
  return correct;
}

}  // namespace

double evaluate_backbone(const GraphDataset& ds, std::span<const int> idx, const BackboneParams& p,
                         int batch_size) {
  if (idx.empty()) return 0.0;
  FrozenScope frozen(p.named());
  int correct = 0;
  for (std::size_t i = 0; i < idx.size(); i += static_cast<std::size_t>(batch_size)) {
    const auto part = idx.subspan(i, std::min(idx.size() - i, static_cast<std::size_t>(batch_size)));
    const auto graphs = pick(ds, part);
    const GraphBatch b = make_graph_batch(graphs);
    correct += count_correct(backbone_forward(b, p).logits, b.labels);
  }
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

BackboneTrainResult train_backbone(const GraphDataset& ds, std::span<const int> train,
                                   std::span<const int> val, const TrainConfig& cfg, Audit* audit) {
  if (train.empty()) throw DataError("training split is empty");
  if (cfg.epochs < 0) throw ArgumentError("epochs must be non-negative");
  BackboneTrainResult res{BackboneParams::init(ds.feature_dim(), ds.num_classes, cfg.seed), {}};
  Adam opt(res.params.named(), cfg.adam);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    int correct = 0;
    for (const auto& mb : make_minibatches(train, cfg.batch_size, rng)) {
      const auto graphs = pick(ds, mb);
      const GraphBatch b = make_graph_batch(graphs);
      if (audit) audit->insert(b.graph_ids.begin(), b.graph_ids.end());
      const auto out = backbone_forward(b, res.params);
      Tensor loss = ops::softmax_cross_entropy(out.logits, b.labels);
      if (!std::isfinite(loss.item())) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
      }
      opt.zero_grad();
      backward(loss);
      opt.step();
      loss_sum += loss.item() * static_cast<double>(mb.size());
      correct += count_correct(out.logits, b.labels);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(train.size());
    rec.train_acc = static_cast<double>(correct) / static_cast<double>(train.size());
    if (!val.empty()) rec.val_acc = evaluate_backbone(ds, val, res.params);
    res.history.push_back(rec);
  }
  return res;
}

BackboneTrainResult train_backbone(const GraphDataset& ds, const TrainConfig& cfg) {
  std::vector<int> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  return train_backbone(ds, all, {}, cfg);
}

}  // namespace sgx
