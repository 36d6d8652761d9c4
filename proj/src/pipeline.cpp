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

#include "sgx/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <numeric>
#include <random>

#include <omp.h>

#include "sgx/ba2motifs.hpp"
#include "sgx/errors.hpp"
#include "sgx/seed.hpp"
#include "sgx/tud.hpp"

namespace sgx {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_ba2motifs(const std::string& name) {
  const auto n = lower(name);
  return n == "ba-2motifs" || n == "ba2motifs" || n == "ba_2motifs";
}

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::string backbone_key(const GraphDataset& ds, const RunConfig& cfg, int fold,
                         const std::vector<int>& train) {
  nlohmann::json k = {{"dataset", ds.name},
                      {"size", ds.size()},
                      {"features", to_string(ds.feature_spec.kind)},
                      {"cap", ds.feature_spec.cap},
                      {"ba_graphs", cfg.ba_graphs},
                      {"ba_seed", cfg.ba_seed},
                      {"epochs", cfg.backbone.epochs},
                      {"batch", cfg.backbone.batch_size},
                      {"lr", cfg.backbone.adam.lr},
                      {"seed", cfg.seed},
                      {"fold", fold},
                      {"train", train}};
  return k.dump();
}

double mean_mask_edges(const std::vector<SubgraphBag>& bags) {
  if (bags.empty()) return 0.0;
  double total = 0.0;
  for (const auto& b : bags) {
    double s = 0.0;
    for (const auto& m : b.masks) s += m.count();
    total += b.masks.empty() ? 0.0 : s / static_cast<double>(b.size());
  }
  return total / static_cast<double>(bags.size());
}

}  // namespace

std::string to_string(BagStrategy s) {
  switch (s) {
    case BagStrategy::kGin: return "GIN";
    case BagStrategy::kNoise: return "noise";
    case BagStrategy::kTopK: return "topk";
    case BagStrategy::kEdgeDeleted: return "ED";
    case BagStrategy::kNodeDeleted: return "ND";
  }
  return "?";
}

BagStrategy bag_strategy_from_string(const std::string& s) {
  const auto l = lower(s);
  if (l == "gin") return BagStrategy::kGin;
  if (l == "noise") return BagStrategy::kNoise;
  if (l == "topk" || l == "top-k") return BagStrategy::kTopK;
  if (l == "ed") return BagStrategy::kEdgeDeleted;
  if (l == "nd") return BagStrategy::kNodeDeleted;
  throw ArgumentError("unknown strategy '" + s + "' (expected GIN, noise, topk, ED or ND)");
}

bool uses_explainer(BagStrategy s) { return s == BagStrategy::kNoise || s == BagStrategy::kTopK; }

bool is_large_dataset(const std::string& name) {
  const auto n = lower(name);
  return n == "proteins" || n == "nci1" || n == "imdb-binary" || n == "imdb-multi";
}

void RunConfig::validate() const {
  if (folds < 2) throw ArgumentError("folds must be at least 2");
  if (!(bag_fraction > 0.0 && bag_fraction <= 1.0)) throw ArgumentError("fraction must lie in (0, 1]");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ArgumentError("test_fraction must lie in (0, 1)");
  if (backbone.epochs < 1 || dss.epochs < 1) throw ArgumentError("epoch counts must be positive");
  if (backbone.batch_size < 1 || dss.batch_size < 1) throw ArgumentError("batch_size must be positive");
  if (!(backbone.adam.lr > 0.0) || !(dss.adam.lr > 0.0)) throw ArgumentError("learning rates must be positive");
  if (ba_graphs <= 0 || ba_graphs % 2 != 0) throw ArgumentError("ba_graphs must be positive and even");
  explainer.validate();
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json grid = nlohmann::json::object();
  for (const auto& [k, v] : c.grid) grid[k] = v;
  return {{"dataset", c.dataset},
          {"data_root", c.data_root},
          {"feature_spec", to_string(c.feature_spec.kind)},
          {"degree_cap", c.feature_spec.cap},
          {"ba_graphs", c.ba_graphs},
          {"ba_seed", c.ba_seed},
          {"allow_large", c.allow_large},
          {"backbone_epochs", c.backbone.epochs},
          {"backbone_lr", c.backbone.adam.lr},
          {"batch_size", c.backbone.batch_size},
          {"explainer_epochs", c.explainer.epochs},
          {"explainer_lr", c.explainer.adam.lr},
          {"lambda", c.explainer.sparsity_weight},
          {"noise_scale", c.explainer.noise_scale},
          {"threshold", c.explainer.threshold},
          {"temperature_start", c.explainer.temperature_start},
          {"temperature_end", c.explainer.temperature_end},
          {"bag_size", c.explainer.bag_size},
          {"fractions", c.explainer.fractions},
          {"dss_epochs", c.dss.epochs},
          {"dss_lr", c.dss.adam.lr},
          {"strategy", to_string(c.strategy)},
          {"fraction", c.bag_fraction},
          {"seed", c.seed},
          {"split_seed", c.split_seed},
          {"folds", c.folds},
          {"test_fraction", c.test_fraction},
          {"grid", grid}};
}

void apply_config_value(RunConfig& c, const std::string& key, const nlohmann::json& v) {
  try {
    if (key == "dataset") c.dataset = v.get<std::string>();
    else if (key == "data_root") c.data_root = v.get<std::string>();
    else if (key == "feature_spec") c.feature_spec.kind = feature_kind_from_string(v.get<std::string>());
    else if (key == "degree_cap") c.feature_spec.cap = v.get<int>();
    else if (key == "ba_graphs") c.ba_graphs = v.get<int>();
    else if (key == "ba_seed") c.ba_seed = v.get<std::uint64_t>();
    else if (key == "allow_large") c.allow_large = v.get<bool>();
    else if (key == "backbone_epochs") c.backbone.epochs = v.get<int>();
    else if (key == "backbone_lr") c.backbone.adam.lr = v.get<double>();
    else if (key == "batch_size") {
      c.backbone.batch_size = c.dss.batch_size = c.explainer.batch_size = v.get<int>();
    } else if (key == "explainer_epochs") c.explainer.epochs = v.get<int>();
    else if (key == "explainer_lr") c.explainer.adam.lr = v.get<double>();
    else if (key == "lambda") c.explainer.sparsity_weight = v.get<double>();
    else if (key == "noise_scale") c.explainer.noise_scale = v.get<double>();
    else if (key == "threshold") c.explainer.threshold = v.get<double>();
    else if (key == "temperature_start") c.explainer.temperature_start = v.get<double>();
    else if (key == "temperature_end") c.explainer.temperature_end = v.get<double>();
    else if (key == "bag_size") c.explainer.bag_size = v.get<int>();
    else if (key == "fractions") c.explainer.fractions = v.get<std::vector<double>>();
    else if (key == "dss_epochs") c.dss.epochs = v.get<int>();
    else if (key == "dss_lr") c.dss.adam.lr = v.get<double>();
    else if (key == "strategy") c.strategy = bag_strategy_from_string(v.get<std::string>());
    else if (key == "fraction") c.bag_fraction = v.get<double>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "split_seed") c.split_seed = v.get<std::uint64_t>();
    else if (key == "folds") c.folds = v.get<int>();
    else if (key == "test_fraction") c.test_fraction = v.get<double>();
    else if (key == "grid") {
      c.grid.clear();
      for (const auto& [k, vals] : v.items()) {
        if (!vals.is_array() || vals.empty()) throw ArgumentError("grid entry '" + k + "' must be a non-empty list");
        if (k == "grid") throw ArgumentError("grid cannot contain 'grid'");
        c.grid[k] = vals.get<std::vector<nlohmann::json>>();
      }
    } else {
      throw ArgumentError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("bad value for config key '" + key + "': " + e.what());
  }
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig base) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) apply_config_value(base, k, v);
  base.validate();
  return base;
}

std::vector<std::array<std::string, 3>> config_key_help() {
  const auto d = config_to_json(RunConfig{});
  const std::vector<std::pair<std::string, std::string>> desc = {
      {"dataset", "MUTAG, BA-2Motifs or any TUD name under data_root"},
      {"data_root", "directory holding <dataset>/<dataset>_A.txt ..."},
      {"feature_spec", "node_labels_onehot | degree_onehot | constant"},
      {"degree_cap", "degree one-hot cap, 0 = observed maximum"},
      {"ba_graphs", "number of synthetic BA-2Motifs graphs"},
      {"ba_seed", "generator seed for BA-2Motifs"},
      {"allow_large", "permit PROTEINS, NCI1 and IMDB runs"},
      {"backbone_epochs", "GIN backbone training epochs"},
      {"backbone_lr", "Adam learning rate of the backbone"},
      {"batch_size", "minibatch size for all stages"},
      {"explainer_epochs", "explainer training epochs"},
      {"explainer_lr", "Adam learning rate of the explainer"},
      {"lambda", "sparsity weight of the explainer loss"},
      {"noise_scale", "scale of the logistic noise"},
      {"threshold", "hard-mask threshold"},
      {"temperature_start", "initial concrete temperature"},
      {"temperature_end", "final concrete temperature"},
      {"bag_size", "masks per bag for the noise strategy"},
      {"fractions", "top-K edge fractions, one mask each"},
      {"dss_epochs", "fine-tuning epochs"},
      {"dss_lr", "Adam learning rate for fine-tuning"},
      {"strategy", "GIN | noise | topk | ED | ND"},
      {"fraction", "share of each bag used per training epoch"},
      {"seed", "master seed for every stage"},
      {"split_seed", "seed of the stratified split"},
      {"folds", "cross-validation folds"},
      {"test_fraction", "holdout share for the train command"},
      {"grid", "hyperparameter -> list of values"}};
  std::vector<std::array<std::string, 3>> out;
  for (const auto& [k, text] : desc) out.push_back({k, d.at(k).dump(), text});
  return out;
}

std::map<std::string, std::vector<nlohmann::json>> default_grid() {
  return {{"lambda", {0.05, 0.1, 0.5, 1.0}},
          {"noise_scale", {0.5, 1.0, 2.0}},
          {"strategy", {"noise", "topk"}}};
}

GraphDataset load_dataset(const RunConfig& cfg) {
  if (is_ba2motifs(cfg.dataset)) return generate_ba2motifs(cfg.ba_graphs, cfg.ba_seed);
  if (is_large_dataset(cfg.dataset) && !cfg.allow_large) {
    throw ArgumentError(cfg.dataset + " is a large dataset; pass --large (allow_large) to run it");
  }
  namespace fs = std::filesystem;
  const fs::path nested = fs::path(cfg.data_root) / cfg.dataset;
  const fs::path dir = fs::is_directory(nested) ? nested : fs::path(cfg.data_root);
  auto ds = load_tud_dataset(dir, cfg.dataset, cfg.feature_spec);
  validate_dataset(ds);
  return ds;
}

std::vector<std::vector<int>> stratified_folds(const GraphDataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw SplitError("need at least 2 folds, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > ds.size()) {
    throw SplitError(std::to_string(k) + " folds for " + std::to_string(ds.size()) + " graphs");
  }
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.graphs[i].label)].push_back(static_cast<int>(i));
  }
  std::mt19937_64 rng(derive_seed({seed, 101}));
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  std::size_t slot = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < static_cast<std::size_t>(k)) {
      throw SplitError("class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                       " graphs, too few for " + std::to_string(k) + " stratified folds");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (int i : members) folds[slot++ % folds.size()].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::pair<std::vector<int>, std::vector<int>> stratified_holdout(const GraphDataset& ds,
                                                                 double test_fraction,
                                                                 std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw SplitError("test fraction must lie in (0, 1)");
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.graphs[i].label)].push_back(static_cast<int>(i));
  }
  std::mt19937_64 rng(derive_seed({seed, 102}));
  std::vector<int> train, test;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < 2) throw SplitError("class " + std::to_string(c) + " needs at least 2 graphs");
    std::shuffle(members.begin(), members.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    test.insert(test.end(), members.begin(), members.begin() + static_cast<long>(n_test));
    train.insert(train.end(), members.begin() + static_cast<long>(n_test), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

std::optional<BackboneCache::Entry> BackboneCache::find(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return Entry{{it->second.result.params.clone(), it->second.result.history}, it->second.audit};
}

void BackboneCache::put(const std::string& key, const Entry& e) {
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(key, Entry{{e.result.params.clone(), e.result.history}, e.audit});
}

std::size_t BackboneCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

const History& FoldRun::selection_history() const { return dss ? dss_history : backbone_history; }

std::vector<SubgraphBag> build_bags(const GraphDataset& ds, const RunConfig& cfg,
                                    const BackboneParams& backbone,
                                    const ExplainerParams* explainer, std::uint64_t seed) {
  if (cfg.strategy == BagStrategy::kGin) return {};
  if (uses_explainer(cfg.strategy) && explainer == nullptr) {
    throw ArgumentError("strategy " + to_string(cfg.strategy) + " needs a trained explainer");
  }
  std::vector<SubgraphBag> bags;
  bags.reserve(ds.size());
  const double tau = cfg.explainer.temperature_end;
  for (const auto& g : ds.graphs) {
    switch (cfg.strategy) {
      case BagStrategy::kEdgeDeleted:
        // Edgeless graphs have nothing to delete; they keep their one view.
        bags.push_back(g.num_edges() ? policy_edge_deleted(g) : singleton_bag(g));
        break;
      case BagStrategy::kNodeDeleted: bags.push_back(policy_node_deleted(g)); break;
      case BagStrategy::kNoise:
        bags.push_back(generate_bag_noise(g, backbone, *explainer, cfg.explainer.bag_size,
                                          cfg.explainer.noise_scale, cfg.explainer.threshold, tau, seed));
        break;
      case BagStrategy::kTopK:
        bags.push_back(generate_bag_topk(g, backbone, *explainer, cfg.explainer.fractions, tau));
        break;
      case BagStrategy::kGin: break;
    }
  }
  return bags;
}

FoldRun run_split(const GraphDataset& ds, const RunConfig& cfg, int fold, std::vector<int> train,
                  std::vector<int> test, BackboneCache* cache) {
  FoldRun r;
  r.fold = fold;
  r.train = std::move(train);
  r.test = std::move(test);
  const auto f = static_cast<std::uint64_t>(fold);

  const std::string key = backbone_key(ds, cfg, fold, r.train);
  std::optional<BackboneCache::Entry> hit = cache ? cache->find(key) : std::nullopt;
  if (hit) {
    r.backbone = std::move(hit->result.params);
    r.backbone_history = std::move(hit->result.history);
    r.audit["backbone"] = std::move(hit->audit);
  } else {
    in_stage("backbone", [&] {
      TrainConfig bc = cfg.backbone;
      bc.seed = derive_seed({cfg.seed, 1, f});
      auto res = train_backbone(ds, r.train, r.test, bc, &r.audit["backbone"]);
      if (cache) cache->put(key, {res, r.audit["backbone"]});
      r.backbone = std::move(res.params);
      r.backbone_history = std::move(res.history);
    });
  }
  if (cfg.strategy == BagStrategy::kGin) return r;

  if (uses_explainer(cfg.strategy)) {
    in_stage("explainer", [&] {
      ExplainerConfig ec = cfg.explainer;
      ec.seed = derive_seed({cfg.seed, 2, f});
      auto res = train_explainer(ds, r.train, r.backbone, ec, &r.audit["explainer"]);
      r.explainer = std::move(res.params);
      r.explainer_history = std::move(res.history);
    });
  }
  in_stage("bags", [&] {
    r.bags = build_bags(ds, cfg, r.backbone, r.explainer ? &*r.explainer : nullptr,
                        derive_seed({cfg.seed, 4, f}));
  });
  r.mean_explanation_edges = mean_mask_edges(r.bags);
  in_stage("finetune", [&] {
    DssTrainConfig dc = cfg.dss;
    dc.seed = derive_seed({cfg.seed, 3, f});
    dc.bag_fraction = cfg.bag_fraction;
    auto res = finetune_dss(ds, r.bags, r.train, r.test, r.backbone, dc, &r.audit["finetune"]);
    r.dss = std::move(res.params);
    r.dss_history = std::move(res.history);
  });
  return r;
}

bool audit_is_clean(const FoldRun& run, const GraphDataset& ds) {
  std::set<int> test_ids;
  for (int i : run.test) test_ids.insert(ds.graphs[static_cast<std::size_t>(i)].id);
  for (const auto& [stage, ids] : run.audit) {
    for (int id : ids) {
      if (test_ids.count(id)) return false;
    }
  }
  return true;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

nlohmann::json CVReport::deterministic_json() const {
  return {{"dataset", dataset},
          {"strategy", strategy},
          {"fraction", bag_fraction},
          {"folds", folds},
          {"fold_accuracies", fold_accuracies},
          {"mean", mean},
          {"std", std},
          {"selected_epoch", selected_epoch},
          {"mean_curve", mean_curve},
          {"mean_explanation_edges", mean_explanation_edges},
          {"leakage_free", leakage_free},
          {"config", config}};
}

nlohmann::json CVReport::to_json() const {
  auto j = deterministic_json();
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

CVReport kfold_cv(const RunConfig& cfg, BackboneCache* cache, std::vector<FoldRun>* runs) {
  const GraphDataset ds = in_stage("load", [&] { return load_dataset(cfg); });
  return kfold_cv(ds, cfg, cache, runs);
}

CVReport kfold_cv(const GraphDataset& ds, const RunConfig& cfg, BackboneCache* cache,
                  std::vector<FoldRun>* runs) {
  const auto start = std::chrono::steady_clock::now();
  in_stage("config", [&] { cfg.validate(); });
  const auto folds = in_stage("split", [&] { return stratified_folds(ds, cfg.folds, cfg.split_seed); });
  const int k = static_cast<int>(folds.size());

  std::vector<FoldRun> out(folds.size());
  std::vector<std::exception_ptr> errors(folds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int f = 0; f < k; ++f) {
    try {
      std::vector<int> train;
      for (int g = 0; g < k; ++g) {
        if (g != f) train.insert(train.end(), folds[static_cast<std::size_t>(g)].begin(),
                                 folds[static_cast<std::size_t>(g)].end());
      }
      std::sort(train.begin(), train.end());
      out[static_cast<std::size_t>(f)] = run_split(ds, cfg, f, std::move(train),
                                                   folds[static_cast<std::size_t>(f)], cache);
    } catch (...) {
      errors[static_cast<std::size_t>(f)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CVReport rep;
  rep.dataset = ds.name;
  rep.strategy = to_string(cfg.strategy);
  rep.bag_fraction = cfg.bag_fraction;
  rep.folds = k;
  rep.config = config_to_json(cfg);
  const std::size_t epochs = out.front().selection_history().size();
  rep.mean_curve.assign(epochs, 0.0);
  for (const auto& run : out) {
    const auto& h = run.selection_history();
    if (h.size() != epochs) throw TrainingError("folds disagree on the number of epochs");
    for (std::size_t e = 0; e < epochs; ++e) rep.mean_curve[e] += h[e].val_acc.value_or(0.0);
    rep.mean_explanation_edges += run.mean_explanation_edges;
    rep.leakage_free = rep.leakage_free && audit_is_clean(run, ds);
  }
  for (auto& v : rep.mean_curve) v /= static_cast<double>(k);
  rep.mean_explanation_edges /= static_cast<double>(k);
  rep.selected_epoch = static_cast<int>(
      std::max_element(rep.mean_curve.begin(), rep.mean_curve.end()) - rep.mean_curve.begin());
  for (const auto& run : out) {
    rep.fold_accuracies.push_back(
        run.selection_history()[static_cast<std::size_t>(rep.selected_epoch)].val_acc.value_or(0.0));
  }
  std::tie(rep.mean, rep.std) = mean_std(rep.fold_accuracies);
  rep.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (runs) *runs = std::move(out);
  return rep;
}

std::vector<RunConfig> expand_grid(const RunConfig& cfg) {
  if (cfg.grid.empty()) throw ArgumentError("grid is empty");
  RunConfig base = cfg;
  base.grid.clear();
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes(cfg.grid.begin(), cfg.grid.end());
  for (const auto& [k, vals] : axes) {
    if (vals.empty()) throw ArgumentError("grid entry '" + k + "' has no values");
  }
  std::vector<RunConfig> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    RunConfig c = base;
    for (std::size_t a = 0; a < axes.size(); ++a) apply_config_value(c, axes[a].first, axes[a].second[idx[a]]);
    c.validate();
    out.push_back(std::move(c));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

std::size_t select_best(const std::vector<CVReport>& reports) {
  if (reports.empty()) throw ArgumentError("no reports to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& a = reports[i];
    const auto& b = reports[best];
    if (a.mean > b.mean || (a.mean == b.mean && a.mean_explanation_edges < b.mean_explanation_edges)) {
      best = i;
    }
  }
  return best;
}

GridResult grid_search(const RunConfig& cfg, BackboneCache* cache) {
  GridResult res;
  res.configs = expand_grid(cfg);
  const GraphDataset ds = in_stage("load", [&] { return load_dataset(cfg); });
  for (const auto& c : res.configs) res.reports.push_back(kfold_cv(ds, c, cache));
  res.best_index = select_best(res.reports);
  res.best = res.configs[res.best_index];
  return res;
}

ThreeStepResult run_three_step(const RunConfig& cfg) {
  in_stage("config", [&] { cfg.validate(); });
  ThreeStepResult out;
  auto ds = std::make_shared<GraphDataset>(in_stage("load", [&] { return load_dataset(cfg); }));
  out.dataset = ds;
  auto [train, test] = in_stage("split", [&] { return stratified_holdout(*ds, cfg.test_fraction, cfg.split_seed); });
  out.run = run_split(*ds, cfg, 0, std::move(train), std::move(test));
  for (const auto& b : out.run.bags) out.heatmaps.push_back(aggregate_heatmap(b));

  const auto& sel = out.run.selection_history();
  auto& rep = out.report;
  rep["config"] = config_to_json(cfg);
  rep["dataset"] = ds->name;
  rep["train_size"] = out.run.train.size();
  rep["test_size"] = out.run.test.size();
  rep["backbone_test_accuracy"] = out.run.backbone_history.back().val_acc.value_or(0.0);
  rep["final_test_accuracy"] = sel.back().val_acc.value_or(0.0);
  rep["mean_explanation_edges"] = out.run.mean_explanation_edges;
  rep["leakage_free"] = audit_is_clean(out.run, *ds);
  if (!out.heatmaps.empty() && ds->graphs.front().motif_edges) {
    int wins = 0;
    double motif = 0.0, background = 0.0;
    for (int i : out.run.test) {
      const auto c = motif_contrast(out.heatmaps[static_cast<std::size_t>(i)]);
      wins += c.motif_mean > c.background_mean;
      motif += c.motif_mean;
      background += c.background_mean;
    }
    const auto n = static_cast<double>(out.run.test.size());
    rep["motif_dominant_share"] = wins / n;
    rep["motif_mean"] = motif / n;
    rep["background_mean"] = background / n;
  }
  return out;
}

}  // namespace sgx
