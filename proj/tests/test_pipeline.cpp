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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "sgx/errors.hpp"
#include "sgx/heatmap.hpp"
#include "sgx/pipeline.hpp"

using namespace sgx;
using namespace sgx::testing;

namespace {

GraphDataset labelled(std::vector<int> labels) {
  GraphDataset ds;
  ds.name = "fixture";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Graph g = path(3 + static_cast<int>(i % 3));
    g.id = static_cast<int>(i);
    g.label = labels[i];
    ds.graphs.push_back(g);
  }
  ds.num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
  return ds;
}

RunConfig tiny_ba_config(BagStrategy s) {
  RunConfig cfg;
  cfg.dataset = "BA-2Motifs";
  cfg.ba_graphs = 24;
  cfg.folds = 2;
  cfg.strategy = s;
  cfg.backbone.epochs = 2;
  cfg.explainer.epochs = 2;
  cfg.dss.epochs = 2;
  cfg.seed = 5;
  return cfg;
}

SubgraphBag bag_with(const Graph& g, std::vector<std::vector<std::uint8_t>> bits) {
  SubgraphBag bag{&g, {}, PolicyTag::kExplainNoise};
  for (auto& b : bits) {
    EdgeMask m;
    m.bits = std::move(b);
    bag.masks.push_back(m);
  }
  return bag;
}

}  // namespace

TEST_CASE("stratified folds") {
  const auto ds = labelled({0, 0, 1, 1});
  const auto folds = stratified_folds(ds, 2, 0);
  REQUIRE(folds.size() == 2);
  std::set<int> all;
  for (const auto& f : folds) {
    CHECK(f.size() == 2);
    std::set<int> classes;
    for (int i : f) classes.insert(ds.graphs[static_cast<std::size_t>(i)].label);
    CHECK(classes.size() == 2);
    all.insert(f.begin(), f.end());
  }
  CHECK(all.size() == 4);
  CHECK(stratified_folds(ds, 2, 0) == folds);

  CHECK_THROWS_AS(stratified_folds(ds, 1, 0), SplitError);
  CHECK_THROWS_AS(stratified_folds(ds, 5, 0), SplitError);
  CHECK_THROWS_AS(stratified_folds(labelled({0, 0, 0, 1}), 2, 0), SplitError);

  const auto big = labelled({0, 1, 0, 1, 0, 1, 0, 0, 0, 1, 1, 0, 0});
  const auto f3 = stratified_folds(big, 3, 7);
  std::vector<std::size_t> sizes;
  for (const auto& f : f3) sizes.push_back(f.size());
  CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);

  const auto [train, test] = stratified_holdout(big, 0.3, 1);
  CHECK(train.size() + test.size() == big.size());
  for (int i : test) CHECK(std::find(train.begin(), train.end(), i) == train.end());
}

TEST_CASE("mean and population standard deviation") {
  const std::vector<double> v{0.8, 0.9, 1.0, 0.7};
  const auto [m, s] = mean_std(v);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= 4.0;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  CHECK(std::abs(m - mean) < 1e-12);
  CHECK(std::abs(s - std::sqrt(var / 4.0)) < 1e-12);
}

TEST_CASE("grid expansion and selection") {
  RunConfig cfg;
  cfg.grid["lambda"] = {0.1, 1.0};
  cfg.grid["noise_scale"] = {0.5, 1.0};
  const auto runs = expand_grid(cfg);
  REQUIRE(runs.size() == 4);
  CHECK(runs[0].explainer.sparsity_weight == 0.1);
  CHECK(runs[0].explainer.noise_scale == 0.5);
  CHECK(runs[1].explainer.noise_scale == 1.0);
  CHECK(runs[2].explainer.sparsity_weight == 1.0);
  for (const auto& r : runs) CHECK(r.grid.empty());

  RunConfig single;
  CHECK_THROWS_AS(expand_grid(single), ArgumentError);
  single.grid["strategy"] = {"noise"};
  REQUIRE(expand_grid(single).size() == 1);
  CHECK(expand_grid(single)[0].strategy == BagStrategy::kNoise);

  std::vector<CVReport> reports(3);
  for (auto& r : reports) r.mean = 0.9;
  CHECK(select_best(reports) == 0);
  reports[2].mean_explanation_edges = -1.0;
  CHECK(select_best(reports) == 2);
  reports[1].mean = 0.91;
  CHECK(select_best(reports) == 1);
  CHECK(default_grid().at("lambda").size() == 4);
}

TEST_CASE("config JSON round-trip and validation") {
  RunConfig cfg;
  cfg.dataset = "BA-2Motifs";
  cfg.strategy = BagStrategy::kNoise;
  cfg.bag_fraction = 0.1;
  cfg.explainer.sparsity_weight = 0.05;
  cfg.explainer.fractions = {0.25, 0.5};
  cfg.backbone.adam.lr = 0.01;
  cfg.grid["lambda"] = {0.5, 1};
  const auto j = config_to_json(cfg);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(back.strategy == BagStrategy::kNoise);
  CHECK(back.explainer.fractions == cfg.explainer.fractions);

  auto bad = j;
  bad["no_such_key"] = 1;
  CHECK_THROWS_AS(config_from_json(bad), ArgumentError);
  apply_config_value(cfg, "fraction", 1.5);
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  CHECK_THROWS_AS(apply_config_value(cfg, "fraction", "half"), ArgumentError);
  CHECK_THROWS_AS(bag_strategy_from_string("random"), ArgumentError);
  CHECK(bag_strategy_from_string("ed") == BagStrategy::kEdgeDeleted);
  for (auto s : {BagStrategy::kGin, BagStrategy::kNoise, BagStrategy::kTopK, BagStrategy::kEdgeDeleted,
                 BagStrategy::kNodeDeleted}) {
    CHECK(bag_strategy_from_string(to_string(s)) == s);
  }
  RunConfig large;
  large.dataset = "PROTEINS";
  CHECK_THROWS_AS(load_dataset(large), ArgumentError);
}

TEST_CASE("heatmap arithmetic") {
  const Graph g = path(4);  // 3 edges
  SUBCASE("identical masks give hard weights") {
    const auto h = aggregate_heatmap(bag_with(g, {{1, 0, 1}, {1, 0, 1}}));
    CHECK(h.weights == std::vector<double>{1, 0, 1});
  }
  SUBCASE("three of ten") {
    std::vector<std::vector<std::uint8_t>> bits(10, {0, 1, 0});
    for (int i = 0; i < 3; ++i) bits[static_cast<std::size_t>(i)][0] = 1;
    const auto h = aggregate_heatmap(bag_with(g, bits));
    CHECK(h.weights[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(h.bag_size == 10);
  }
  SUBCASE("nested masks give frequencies by depth") {
    const auto h = aggregate_heatmap(bag_with(g, {{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 1, 1}}));
    CHECK(h.weights == std::vector<double>{1.0, 0.75, 0.5});
  }
  SUBCASE("ramp and pen width") {
    CHECK(pen_width(0.0) == 1.0);
    CHECK(pen_width(1.0) == 5.0);
    CHECK(ramp_index(0.0) == 0);
    CHECK(ramp_index(1.0) == 9);
    const auto h = aggregate_heatmap(bag_with(g, {{1, 0, 1}}));
    const auto dot = heatmap_to_dot(h);
    CHECK(dot.find("0 -- 1 [penwidth=5, color=\"" + std::string(kHeatRamp[9]) + "\"") != std::string::npos);
    CHECK(dot.find("1 -- 2 [penwidth=1, color=\"" + std::string(kHeatRamp[0]) + "\"") != std::string::npos);
    CHECK(heatmap_to_svg(h).find("<svg") != std::string::npos);
  }
  SUBCASE("JSON round-trip and export") {
    Graph m = g;
    m.motif_edges = std::vector<int>{1};
    auto h = aggregate_heatmap(bag_with(m, {{1, 0, 1}, {0, 0, 1}, {1, 1, 1}}));
    CHECK(heatmap_from_json(heatmap_to_json(h)) == h);
    const auto c = motif_contrast(h);
    CHECK(c.motif_mean == doctest::Approx(1.0 / 3.0));
    CHECK(c.background_mean == doctest::Approx(5.0 / 6.0));

    const auto dir = std::filesystem::temp_directory_path() / "sgx_heatmap_test";
    std::filesystem::create_directories(dir);
    export_heatmap(h, HeatmapFormat::kJson, dir / "h.json");
    std::ifstream in(dir / "h.json");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(heatmap_from_json(nlohmann::json::parse(ss.str())) == h);
    CHECK_THROWS_AS(export_heatmap(h, HeatmapFormat::kDot, "/proc/no/such/dir/h.dot"), IoError);
    CHECK_THROWS_AS(heatmap_format_from_string("png"), ArgumentError);
  }
}

TEST_CASE("cross-validation is reproducible and leakage free") {
  for (auto s : {BagStrategy::kGin, BagStrategy::kTopK, BagStrategy::kNoise, BagStrategy::kNodeDeleted}) {
    CAPTURE(to_string(s));
    const auto cfg = tiny_ba_config(s);
    std::vector<FoldRun> runs;
    const auto a = kfold_cv(cfg, nullptr, &runs);
    const auto b = kfold_cv(cfg);
    CHECK(a.deterministic_json() == b.deterministic_json());
    CHECK(a.leakage_free);
    CHECK(a.fold_accuracies.size() == 2);
    const auto [m, sd] = mean_std(a.fold_accuracies);
    CHECK(std::abs(m - a.mean) < 1e-12);
    CHECK(std::abs(sd - a.std) < 1e-12);
    REQUIRE(runs.size() == 2);
    const auto ds = load_dataset(cfg);
    for (const auto& r : runs) {
      CHECK(audit_is_clean(r, ds));
      for (const auto& [stage, ids] : r.audit) {
        for (int t : r.test) CHECK(ids.count(ds.graphs[static_cast<std::size_t>(t)].id) == 0);
      }
    }
  }
}

TEST_CASE("backbone cache reuse does not change results") {
  BackboneCache cache;
  auto cfg = tiny_ba_config(BagStrategy::kEdgeDeleted);
  const auto fresh = kfold_cv(cfg);
  const auto first = kfold_cv(cfg, &cache);
  CHECK(cache.size() == 2);
  const auto second = kfold_cv(cfg, &cache);
  CHECK(fresh.deterministic_json() == first.deterministic_json());
  CHECK(first.deterministic_json() == second.deterministic_json());
}

TEST_CASE("grid search over one point returns it") {
  auto cfg = tiny_ba_config(BagStrategy::kTopK);
  cfg.grid["lambda"] = {0.2};
  const auto res = grid_search(cfg);
  CHECK(res.reports.size() == 1);
  CHECK(res.best_index == 0);
  CHECK(res.best.explainer.sparsity_weight == 0.2);
}

TEST_CASE("three-step run emits heatmaps and a report") {
  auto cfg = tiny_ba_config(BagStrategy::kTopK);
  const auto a = run_three_step(cfg);
  const auto b = run_three_step(cfg);
  CHECK(a.report == b.report);
  CHECK(a.report.at("leakage_free").get<bool>());
  CHECK(a.heatmaps.size() == a.dataset->size());
  CHECK(a.report.contains("motif_mean"));
}
