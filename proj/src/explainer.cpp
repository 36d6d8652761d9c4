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

#include "sgx/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sgx/errors.hpp"
#include "sgx/ops.hpp"
#include "sgx/seed.hpp"

namespace sgx {

ExplainerParams ExplainerParams::init(std::size_t hidden, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ExplainerParams p;
  p.w1 = init_uniform(2 * hidden, hidden, 2 * hidden, rng);
  p.b1 = init_uniform(1, hidden, 2 * hidden, rng);
  p.w2 = init_uniform(hidden, 1, hidden, rng);
  p.b2 = init_uniform(1, 1, hidden, rng);
  return p;
}

ExplainerParams ExplainerParams::zeros(std::size_t hidden) {
  return {Tensor::zeros(2 * hidden, hidden, true), Tensor::zeros(1, hidden, true),
          Tensor::zeros(hidden, 1, true), Tensor::zeros(1, 1, true)};
}

NamedTensors ExplainerParams::named() const {
  return {{"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}};
}

ExplainerParams ExplainerParams::clone() const {
  auto c = [](const Tensor& t) {
    Tensor x = t.clone();
    x.set_requires_grad(true);
    return x;
  };
  return {c(w1), c(b1), c(w2), c(b2)};
}

double ExplainerConfig::temperature_at(int epoch) const {
  if (epochs <= 1) return temperature_end;
  const double t = static_cast<double>(std::clamp(epoch, 0, epochs - 1)) / static_cast<double>(epochs - 1);
  return temperature_start + (temperature_end - temperature_start) * t;
}

void ExplainerConfig::validate() const {
  if (!(temperature_start > 0.0 && temperature_end > 0.0)) throw ArgumentError("temperatures must be positive");
  if (sparsity_weight < 0.0) throw ArgumentError("sparsity weight must be non-negative");
  if (noise_scale < 0.0) throw ArgumentError("noise scale must be non-negative");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ArgumentError("threshold must lie in (0, 1)");
  if (bag_size < 1) throw ArgumentError("bag size must be at least 1");
  if (fractions.empty()) throw ArgumentError("fraction list is empty");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) throw ArgumentError("fractions must lie in (0, 1]");
    if (i > 0 && fractions[i] < fractions[i - 1]) throw ArgumentError("fractions must be ascending");
  }
}

Tensor edge_logits(const Tensor& z, std::span<const Edge> edges, const ExplainerParams& p) {
  if (z.cols() * 2 != p.w1.rows()) {
    throw DimensionError("explainer expects node width " + std::to_string(p.w1.rows() / 2) +
                         ", got " + std::to_string(z.cols()));
  }
  Tensor pairs = ops::edge_pair_features(z, edges);
  Tensor h = ops::relu(ops::linear(pairs, p.w1, p.b1));
  return ops::linear(h, p.w2, p.b2);
}

Tensor edge_logits(const Tensor& z, const Graph& g, const ExplainerParams& p) {
  return edge_logits(z, std::span<const Edge>(g.edges), p);
}

std::vector<double> logistic_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    // u in the open interval (0, 1) from the top 53 bits.
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    v = std::log(u) - std::log1p(-u);
  }
  return out;
}

Tensor concrete_sample(const Tensor& omega, double tau, double noise_scale, std::uint64_t seed) {
  if (!(tau > 0.0)) throw ArgumentError("temperature must be positive, got " + std::to_string(tau));
  Tensor shifted = omega;
  if (noise_scale != 0.0) {
    auto noise = logistic_noise(omega.size(), seed);
    for (auto& v : noise) v *= noise_scale;
    shifted = ops::add_constant(omega, noise);
  }
  return ops::sigmoid(ops::scale(shifted, 1.0 / tau));
}

Tensor binarize_ste(const Tensor& s, double threshold) {
  std::vector<double> hard(s.size());
  const auto sv = s.values();
  for (std::size_t k = 0; k < hard.size(); ++k) hard[k] = sv[k] > threshold ? 1.0 : 0.0;
  return ops::straight_through(std::move(hard), s);
}

std::vector<std::uint8_t> topk_bits(std::span<const double> s, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > s.size()) {
    throw ArgumentError("budget K=" + std::to_string(k) + " outside [1, " + std::to_string(s.size()) + "]");
  }
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  std::vector<std::uint8_t> bits(s.size(), 0);
  for (int i = 0; i < k; ++i) bits[order[static_cast<std::size_t>(i)]] = 1;
  return bits;
}

Tensor topk_binarize(const Tensor& s, int k) {
  const auto bits = topk_bits(s.values(), k);
  return ops::straight_through(std::vector<double>(bits.begin(), bits.end()), s);
}

EdgeMask to_edge_mask(const Tensor& s, const Tensor& hard, double threshold) {
  EdgeMask m;
  m.soft.assign(s.values().begin(), s.values().end());
  m.bits.resize(hard.size());
  for (std::size_t k = 0; k < hard.size(); ++k) m.bits[k] = hard.values()[k] > 0.5 ? 1 : 0;
  m.threshold_used = threshold;
  return m;
}

Tensor explainer_loss(const Tensor& masked_logits, std::span<const int> targets, const Tensor& e,
                      const SparseMatrix& edge_mean, double lambda) {
  if (lambda < 0.0) throw ArgumentError("sparsity weight must be non-negative, got " + std::to_string(lambda));
  Tensor ce = ops::softmax_cross_entropy(masked_logits, targets);
  if (lambda == 0.0) return ce;
  auto op = std::make_shared<const SparseMatrix>(edge_mean);
  Tensor kept = ops::sum_all(ops::spmm(op, e));
  return ops::add(ce, ops::scale(kept, lambda / static_cast<double>(targets.size())));
}

Tensor explainer_loss(const Tensor& masked_logits, int target, const Tensor& e, double lambda) {
  const int t[1] = {target};
  std::vector<SparseMatrix::Entry> entries;
  const double inv = e.size() ? 1.0 / static_cast<double>(e.size()) : 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) entries.push_back({0, static_cast<int>(k), inv});
  return explainer_loss(masked_logits, std::span<const int>(t, 1), e, SparseMatrix(1, e.size(), entries), lambda);
}

namespace {

struct FrozenView {
  Tensor z;
  int target = 0;
};

// Node embeddings and predicted label of the frozen backbone per graph.
FrozenView frozen_view(const Graph& g, const BackboneParams& backbone) {
  FrozenScope frozen(backbone.named());
  const auto out = backbone_forward(g, nullptr, backbone);
  return {out.node_embeddings, predict_from_logits(out.logits.values()).label};
}

Tensor stack_rows(std::span<const Tensor> parts) {
  std::size_t rows = 0, cols = parts.empty() ? 0 : parts.front().cols();
  for (const auto& t : parts) rows += t.rows();
  std::vector<double> v;
  v.reserve(rows * cols);
  for (const auto& t : parts) v.insert(v.end(), t.values().begin(), t.values().end());
  return Tensor::from(rows, cols, std::move(v));
}

}  // namespace

ExplainerTrainResult train_explainer(const GraphDataset& ds, std::span<const int> train,
                                     const BackboneParams& backbone, const ExplainerConfig& cfg,
                                     Audit* audit) {
  cfg.validate();
  if (train.empty()) throw DataError("explainer training split is empty");
  ExplainerTrainResult res{ExplainerParams::init(backbone.head_w.rows(), derive_seed({cfg.seed, 1})), {}};
  FrozenScope frozen(backbone.named());

  std::vector<FrozenView> views(ds.size());
  for (int i : train) views[static_cast<std::size_t>(i)] = frozen_view(ds.graphs[static_cast<std::size_t>(i)], backbone);

  Adam opt(res.params.named(), cfg.adam);
  std::mt19937_64 rng(derive_seed({cfg.seed, 2}));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double tau = cfg.temperature_at(epoch);
    double loss_sum = 0.0;
    int agree = 0;
    int batch_no = 0;
    for (const auto& mb : make_minibatches(train, cfg.batch_size, rng)) {
      std::vector<const Graph*> graphs;
      std::vector<Tensor> zs;
      std::vector<int> targets;
      for (int i : mb) {
        graphs.push_back(&ds.graphs[static_cast<std::size_t>(i)]);
        zs.push_back(views[static_cast<std::size_t>(i)].z);
        targets.push_back(views[static_cast<std::size_t>(i)].target);
      }
      const GraphBatch b = make_graph_batch(graphs);
      if (audit) audit->insert(b.graph_ids.begin(), b.graph_ids.end());
      Tensor omega = edge_logits(stack_rows(zs), b.edges, res.params);
      Tensor s = concrete_sample(omega, tau, cfg.noise_scale,
                                 derive_seed({cfg.seed, 3, static_cast<std::uint64_t>(epoch),
                                              static_cast<std::uint64_t>(batch_no++)}));
      Tensor e = binarize_ste(s, cfg.threshold);
      const auto out = backbone_forward(b, backbone, &e);
      Tensor loss = explainer_loss(out.logits, targets, e, *b.edge_mean, cfg.sparsity_weight);
      if (!std::isfinite(loss.item())) {
        throw TrainingError("non-finite explainer loss at epoch " + std::to_string(epoch));
      }
      opt.zero_grad();
      backward(loss);
      opt.step();
      loss_sum += loss.item() * static_cast<double>(mb.size());
      const std::size_t c = out.logits.cols();
      for (std::size_t r = 0; r < mb.size(); ++r) {
        if (predict_from_logits(out.logits.values().subspan(r * c, c)).label == targets[r]) ++agree;
      }
    }
    res.history.push_back({epoch, loss_sum / static_cast<double>(train.size()),
                           static_cast<double>(agree) / static_cast<double>(train.size()), std::nullopt});
  }
  return res;
}

std::vector<double> edge_probabilities(const Graph& g, const BackboneParams& backbone,
                                       const ExplainerParams& explainer, double tau) {
  FrozenScope fb(backbone.named());
  FrozenScope fe(explainer.named());
  const auto view = frozen_view(g, backbone);
  Tensor s = concrete_sample(edge_logits(view.z, g, explainer), tau, 0.0, 0);
  return {s.values().begin(), s.values().end()};
}

SubgraphBag generate_bag_noise(const Graph& g, const BackboneParams& backbone,
                               const ExplainerParams& explainer, int m, double noise_scale,
                               double threshold, double tau, std::uint64_t seed) {
  if (m < 1) throw ArgumentError("bag size must be at least 1");
  FrozenScope fb(backbone.named());
  FrozenScope fe(explainer.named());
  const auto view = frozen_view(g, backbone);
  Tensor omega = edge_logits(view.z, g, explainer);
  SubgraphBag bag{&g, {}, PolicyTag::kExplainNoise};
  for (int j = 0; j < m; ++j) {
    const auto draw_seed = derive_seed({seed, static_cast<std::uint64_t>(g.id), static_cast<std::uint64_t>(j)});
    Tensor s = concrete_sample(omega, tau, noise_scale, draw_seed);
    EdgeMask mask = to_edge_mask(s, binarize_ste(s, threshold), threshold);
    mask.seed = draw_seed;
    bag.masks.push_back(std::move(mask));
  }
  return bag;
}

SubgraphBag generate_bag_noise(const Graph& g, const BackboneParams& backbone,
                               const ExplainerParams& explainer, const ExplainerConfig& cfg) {
  return generate_bag_noise(g, backbone, explainer, cfg.bag_size, cfg.noise_scale, cfg.threshold,
                            cfg.temperature_end, derive_seed({cfg.seed, 4}));
}

SubgraphBag generate_bag_topk(const Graph& g, const BackboneParams& backbone,
                              const ExplainerParams& explainer, std::span<const double> fractions,
                              double tau) {
  if (fractions.empty()) throw ArgumentError("fraction list is empty");
  const auto probs = edge_probabilities(g, backbone, explainer, tau);
  const Tensor s = Tensor::from(probs.size(), 1, probs);
  SubgraphBag bag{&g, {}, PolicyTag::kExplainTopK};
  const auto num_edges = static_cast<double>(g.num_edges());
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ArgumentError("fractions must lie in (0, 1]");
    EdgeMask mask;
    mask.soft = probs;
    if (g.num_edges() == 0) {
      mask.budget = 0;
    } else {
      const int k = std::min(static_cast<int>(g.num_edges()),
                             std::max(1, static_cast<int>(std::ceil(f * num_edges - 1e-9))));
      mask.bits = topk_bits(s.values(), k);
      mask.budget = k;
    }
    bag.masks.push_back(std::move(mask));
  }
  return bag;
}

}  // namespace sgx
