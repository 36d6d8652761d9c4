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

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "sgx/ba2motifs.hpp"
#include "sgx/backbone.hpp"
#include "sgx/errors.hpp"
#include "sgx/explainer.hpp"
#include "sgx/grad_check.hpp"
#include "sgx/ops.hpp"
#include "sgx/seed.hpp"

using namespace sgx;
using namespace sgx::testing;

namespace {

std::vector<double> values_of(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

Tensor column(std::vector<double> v, bool grad = false) {
  const std::size_t n = v.size();
  return Tensor::from(n, 1, std::move(v), grad);
}

double mean_kept(const SubgraphBag& bag) {
  double s = 0.0;
  for (const auto& m : bag.masks) s += m.count();
  return s / static_cast<double>(bag.size());
}

}  // namespace

TEST_CASE("edge logits of a zero network are zero") {
  std::mt19937_64 rng(1);
  const Graph g = random_graph(5, 2, 1, rng);
  const Tensor z = random_tensor(5, kHidden, rng);
  const Tensor w = edge_logits(z, g, ExplainerParams::zeros(kHidden));
  CHECK(w.size() == g.num_edges());
  for (double v : w.values()) CHECK(v == 0.0);
  CHECK_THROWS_AS(edge_logits(random_tensor(5, 3, rng), g, ExplainerParams::zeros(kHidden)), DimensionError);
}

TEST_CASE("concrete relaxation examples") {
  const Tensor zero = column({0.0, 0.0, 0.0});
  for (double v : values_of(concrete_sample(zero, 1.0, 0.0, 3))) CHECK(v == 0.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(concrete_sample(column({50.0}), 1.0, 1.0, seed).item() > 1.0 - 1e-9);
  }
  CHECK_THROWS_AS(concrete_sample(zero, 0.0, 1.0, 0), ArgumentError);
  CHECK_THROWS_AS(concrete_sample(zero, -1.0, 1.0, 0), ArgumentError);
  CHECK(values_of(concrete_sample(zero, 1.0, 1.0, 7)) == values_of(concrete_sample(zero, 1.0, 1.0, 7)));
}

TEST_CASE("thresholding at zero logit is a fair coin") {
  const Tensor w = column({0.0});
  int hits = 0;
  const int n = 10000;
  for (int seed = 0; seed < n; ++seed) {
    if (concrete_sample(w, 1.0, 1.0, static_cast<std::uint64_t>(seed)).item() > 0.5) ++hits;
  }
  CHECK(std::abs(hits / static_cast<double>(n) - 0.5) <= 0.02);
}

TEST_CASE("hard masks") {
  CHECK(values_of(binarize_ste(column({0.7, 0.2}), 0.5)) == std::vector<double>{1, 0});
  CHECK(values_of(binarize_ste(column({0.5, 0.5}), 0.5)) == std::vector<double>{0, 0});
  CHECK(topk_bits(std::vector<double>{0.9, 0.1, 0.5}, 2) == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(topk_bits(std::vector<double>{0.9, 0.1, 0.5}, 3) == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(topk_bits(std::vector<double>{0.5, 0.5, 0.1}, 1) == std::vector<std::uint8_t>{1, 0, 0});
  CHECK_THROWS_AS(topk_bits(std::vector<double>{0.5, 0.5}, 0), ArgumentError);
  CHECK_THROWS_AS(topk_bits(std::vector<double>{0.5, 0.5}, 3), ArgumentError);

  // every value hard, budget exact
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Tensor s = random_tensor(13, 1, rng, 0.0, 1.0);
    const int k = 1 + t % 13;
    const Tensor e = topk_binarize(s, k);
    double kept = 0.0;
    for (double v : e.values()) {
      CHECK((v == 0.0 || v == 1.0));
      kept += v;
    }
    CHECK(kept == k);
    for (double v : values_of(binarize_ste(s, 0.5))) CHECK((v == 0.0 || v == 1.0));
  }
}

TEST_CASE("straight-through identity: d(sum e)/d omega equals d(sum s)/d omega") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    Tensor w1 = random_tensor(9, 1, rng, -2, 2);
    backward(ops::sum_all(binarize_ste(concrete_sample(w1, 0.7, 1.0, 11), 0.5)));
    Tensor w2 = Tensor::from(9, 1, values_of(w1), true);
    backward(ops::sum_all(concrete_sample(w2, 0.7, 1.0, 11)));
    CHECK(values_of(Tensor::from(9, 1, {w1.grad().begin(), w1.grad().end()})) ==
          std::vector<double>(w2.grad().begin(), w2.grad().end()));

    Tensor w3 = Tensor::from(9, 1, values_of(w1), true);
    backward(ops::sum_all(topk_binarize(concrete_sample(w3, 0.7, 1.0, 11), 3)));
    CHECK(std::vector<double>(w3.grad().begin(), w3.grad().end()) ==
          std::vector<double>(w2.grad().begin(), w2.grad().end()));
  }
}

TEST_CASE("explainer loss examples") {
  const double gap = std::log(4.0);
  const Tensor logits = Tensor::from(1, 2, {gap, 0.0});
  CHECK(explainer_loss(logits, 0, column({1, 0, 1}), 0.0).item() == doctest::Approx(-std::log(0.8)).epsilon(1e-12));
  const double ce = explainer_loss(logits, 0, column({0, 0, 0}), 0.0).item();
  CHECK(explainer_loss(logits, 0, column({0, 0, 0}), 1.0).item() == doctest::Approx(ce).epsilon(1e-15));
  CHECK(explainer_loss(logits, 0, column({1, 1, 1}), 1.0).item() - ce == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(explainer_loss(logits, 0, column({1, 0, 0, 1}), 0.5).item() - ce == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(explainer_loss(logits, 0, column({1}), -0.1), ArgumentError);
}

TEST_CASE("explainer loss with the STE replaced by its identity passes the gradient oracle") {
  std::mt19937_64 rng(2);
  const Graph g = random_graph(6, 2, 1, rng);
  const auto backbone = BackboneParams::init(1, 2, 3);
  const auto explainer = ExplainerParams::init(kHidden, 4);
  Tensor z;
  {
    FrozenScope frozen(backbone.named());
    z = backbone_forward(g, nullptr, backbone).node_embeddings;
  }
  const Graph* gp = &g;
  const GraphBatch batch = make_graph_batch(std::span<const Graph* const>(&gp, 1));
  auto f = [&] {
    FrozenScope frozen(backbone.named());
    const Tensor s = concrete_sample(edge_logits(z, g, explainer), 2.0, 1.0, 9);
    const Tensor logits = backbone_forward(batch, backbone, &s).logits;
    const int t[1] = {1};
    return explainer_loss(logits, t, s, *batch.edge_mean, 0.3);
  };
  const auto r = grad_check(f, explainer.named());
  INFO(r.worst_param);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("temperature schedule and config validation") {
  ExplainerConfig cfg;
  cfg.epochs = 5;
  CHECK(cfg.temperature_at(0) == 5.0);
  CHECK(cfg.temperature_at(4) == doctest::Approx(1.0));
  cfg.threshold = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg.threshold = 0.5;
  cfg.sparsity_weight = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

TEST_CASE("bag generators") {
  const auto ds = generate_ba2motifs(4, 2);
  const Graph& g = ds.graphs[0];
  REQUIRE(g.num_edges() >= 20);
  const auto backbone = BackboneParams::init(ds.feature_dim(), 2, 1);
  const auto explainer = ExplainerParams::init(kHidden, 2);

  SUBCASE("noise scale 0 gives identical masks") {
    const auto bag = generate_bag_noise(g, backbone, explainer, 6, 0.0, 0.5, 1.0, 3);
    CHECK(bag.size() == 6);
    for (const auto& m : bag.masks) CHECK(m.bits == bag.masks[0].bits);
  }
  SUBCASE("m = 1 is a singleton bag") {
    CHECK(generate_bag_noise(g, backbone, explainer, 1, 1.0, 0.5, 1.0, 3).size() == 1);
  }
  SUBCASE("identical seeds give identical bags") {
    const auto a = generate_bag_noise(g, backbone, explainer, 10, 1.0, 0.5, 1.0, 8);
    const auto b = generate_bag_noise(g, backbone, explainer, 10, 1.0, 0.5, 1.0, 8);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.masks[i] == b.masks[i]);
    const auto c = generate_bag_noise(g, backbone, explainer, 10, 1.0, 0.5, 1.0, 9);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a.masks[i].bits != c.masks[i].bits;
    CHECK(any_diff);
  }
  SUBCASE("top-K budgets and nesting") {
    Graph twenty = g;
    twenty.edges.resize(20);
    const std::vector<double> small{0.05};
    const auto one = generate_bag_topk(twenty, backbone, explainer, small);
    CHECK(one.masks[0].count() == 1);
    CHECK(one.masks[0].budget == 1);

    const ExplainerConfig cfg;
    const auto bag = generate_bag_topk(g, backbone, explainer, cfg.fractions);
    REQUIRE(bag.size() == 8);
    const double e = static_cast<double>(g.num_edges());
    for (std::size_t i = 0; i < bag.size(); ++i) {
      CHECK(bag.masks[i].count() == std::max(1, static_cast<int>(std::ceil(cfg.fractions[i] * e - 1e-9))));
      if (i == 0) continue;
      for (std::size_t k = 0; k < g.num_edges(); ++k) {
        if (bag.masks[i - 1].bits[k]) CHECK(bag.masks[i].bits[k] == 1);
      }
    }
    CHECK_THROWS_AS(generate_bag_topk(g, backbone, explainer, std::vector<double>{}), ArgumentError);
    CHECK_THROWS_AS(generate_bag_topk(g, backbone, explainer, std::vector<double>{1.5}), ArgumentError);
  }
}

TEST_CASE("explainer training") {
  const auto ds = generate_ba2motifs(24, 5);
  std::vector<int> train(ds.size());
  std::iota(train.begin(), train.end(), 0);
  TrainConfig bcfg;
  bcfg.epochs = 5;
  bcfg.seed = 1;
  const auto backbone = train_backbone(ds, bcfg).params;

  ExplainerConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 3;
  SUBCASE("zero epochs leaves the initialization") {
    const auto res = train_explainer(ds, train, backbone, cfg);
    const auto init = ExplainerParams::init(kHidden, derive_seed({cfg.seed, 1}));
    CHECK(values_of(res.params.w1) == values_of(init.w1));
    CHECK(values_of(res.params.b2) == values_of(init.b2));
    CHECK(res.history.empty());
  }
  SUBCASE("a large sparsity weight keeps fewer edges") {
    cfg.epochs = 8;
    cfg.adam.lr = 1e-2;
    cfg.sparsity_weight = 0.0;
    const auto loose = train_explainer(ds, train, backbone, cfg);
    cfg.sparsity_weight = 1e3;
    Audit audit;
    const auto tight = train_explainer(ds, train, backbone, cfg, &audit);
    CHECK(audit.size() == ds.size());
    double kept_loose = 0.0, kept_tight = 0.0;
    for (const auto& g : ds.graphs) {
      kept_loose += mean_kept(generate_bag_noise(g, backbone, loose.params, cfg));
      kept_tight += mean_kept(generate_bag_noise(g, backbone, tight.params, cfg));
    }
    CHECK(kept_tight < kept_loose);
    const auto again = train_explainer(ds, train, backbone, cfg);
    CHECK(values_of(again.params.w1) == values_of(tight.params.w1));
  }
}
