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

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgx/backbone.hpp"
#include "sgx/bag.hpp"
#include "sgx/dss.hpp"
#include "sgx/explainer.hpp"
#include "sgx/graph.hpp"
#include "sgx/heatmap.hpp"

namespace sgx {

// How each graph's bag is built for fine-tuning. kGin trains the backbone
// alone and is the plain GIN baseline.
enum class BagStrategy { kGin, kNoise, kTopK, kEdgeDeleted, kNodeDeleted };

std::string to_string(BagStrategy s);
// Accepts "GIN", "noise", "topk", "ED", "ND" (case-insensitive).
BagStrategy bag_strategy_from_string(const std::string& s);
bool uses_explainer(BagStrategy s);

// Datasets that only run when RunConfig::allow_large is set.
bool is_large_dataset(const std::string& name);

struct RunConfig {
  std::string dataset = "MUTAG";
  std::string data_root = "data";
  FeatureSpec feature_spec;
  int ba_graphs = 1000;
  std::uint64_t ba_seed = 0;
  bool allow_large = false;

  TrainConfig backbone;
  ExplainerConfig explainer;
  DssTrainConfig dss;

  BagStrategy strategy = BagStrategy::kTopK;
  double bag_fraction = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  int folds = 10;
  double test_fraction = 0.2;  // holdout share for run_three_step

  // Hyperparameter name -> candidate values, keyed as in the flat config.
  std::map<std::string, std::vector<nlohmann::json>> grid;

  // Throws ArgumentError on any out-of-range field.
  void validate() const;
};

// Flat key/value JSON. Unknown keys raise ArgumentError.
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
void apply_config_value(RunConfig& cfg, const std::string& key, const nlohmann::json& value);
// Key/default/description triples for help output.
std::vector<std::array<std::string, 3>> config_key_help();
// Default grid used when a grid run has no grid of its own.
std::map<std::string, std::vector<nlohmann::json>> default_grid();

GraphDataset load_dataset(const RunConfig& cfg);

// Stratified split into k folds: every class is shuffled under `seed` and
// dealt round-robin, so fold sizes differ by at most one. Returns the test
// indices of each fold. Throws SplitError when k < 2, k exceeds the dataset
// size or some class has fewer than k members.
std::vector<std::vector<int>> stratified_folds(const GraphDataset& ds, int k, std::uint64_t seed);
// Stratified holdout: {train, test}.
std::pair<std::vector<int>, std::vector<int>> stratified_holdout(const GraphDataset& ds,
                                                                 double test_fraction,
                                                                 std::uint64_t seed);

// Step-1 results shared between runs that use the same backbone settings and
// splits (for example GIN, DSS-ED and the full framework on one dataset).
class BackboneCache {
 public:
  struct Entry {
    BackboneTrainResult result;
    Audit audit;
  };
  // Returns a deep copy so callers never share tensors.
  std::optional<Entry> find(const std::string& key) const;
  void put(const std::string& key, const Entry& e);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
};

struct FoldRun {
  int fold = 0;
  std::vector<int> train, test;
  BackboneParams backbone;
  std::optional<ExplainerParams> explainer;
  std::optional<DssParams> dss;
  History backbone_history, explainer_history, dss_history;
  std::vector<SubgraphBag> bags;  // one per graph; empty for the GIN baseline
  std::map<std::string, Audit> audit;  // stage -> graph ids used for training
  double mean_explanation_edges = 0.0;

  // Per-epoch test-split accuracy of the final model.
  const History& selection_history() const;
};

// Runs the three steps on one split. Test graphs are only evaluated.
FoldRun run_split(const GraphDataset& ds, const RunConfig& cfg, int fold, std::vector<int> train,
                  std::vector<int> test, BackboneCache* cache = nullptr);

// True when no stage trained on a test graph.
bool audit_is_clean(const FoldRun& run, const GraphDataset& ds);

struct CVReport {
  std::string dataset;
  std::string strategy;
  double bag_fraction = 1.0;
  int folds = 0;
  std::vector<double> fold_accuracies;  // at the selected epoch
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over folds
  int selected_epoch = 0;
  std::vector<double> mean_curve;  // mean test accuracy per epoch
  double mean_explanation_edges = 0.0;
  bool leakage_free = true;
  nlohmann::json config;
  double wall_clock_seconds = 0.0;

  // Everything except the wall-clock time; equal for reruns under one seed.
  nlohmann::json deterministic_json() const;
  nlohmann::json to_json() const;
};

// Mean and population std of the values.
std::pair<double, double> mean_std(const std::vector<double>& v);

// Folds run concurrently. Per-fold models are returned through `runs` when
// it is non-null.
CVReport kfold_cv(const RunConfig& cfg, BackboneCache* cache = nullptr,
                  std::vector<FoldRun>* runs = nullptr);
CVReport kfold_cv(const GraphDataset& ds, const RunConfig& cfg, BackboneCache* cache = nullptr,
                  std::vector<FoldRun>* runs = nullptr);

struct GridResult {
  RunConfig best;
  std::size_t best_index = 0;
  std::vector<RunConfig> configs;  // enumeration order
  std::vector<CVReport> reports;
};

// Every combination of cfg.grid, enumerated with the first key (in sorted
// key order) varying slowest.
std::vector<RunConfig> expand_grid(const RunConfig& cfg);
// Picks the highest mean accuracy; ties go to fewer mean explanation edges,
// then to the earlier configuration.
std::size_t select_best(const std::vector<CVReport>& reports);
GridResult grid_search(const RunConfig& cfg, BackboneCache* cache = nullptr);

struct ThreeStepResult {
  std::shared_ptr<const GraphDataset> dataset;
  FoldRun run;
  std::vector<ExplanationHeatmap> heatmaps;  // one per graph that has a bag
  nlohmann::json report;
};

// Holdout run of the full pipeline with heatmaps of the final bags.
ThreeStepResult run_three_step(const RunConfig& cfg);

// Bags for every graph under the configured strategy.
std::vector<SubgraphBag> build_bags(const GraphDataset& ds, const RunConfig& cfg,
                                    const BackboneParams& backbone,
                                    const ExplainerParams* explainer, std::uint64_t seed);

}  // namespace sgx
