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

// Command-line front end: dataset generation, three-step training,
// cross-validation, grid search, heatmap export and Table-1 baselines.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sgx/ba2motifs.hpp"
#include "sgx/checkpoint.hpp"
#include "sgx/errors.hpp"
#include "sgx/heatmap.hpp"
#include "sgx/io.hpp"
#include "sgx/pipeline.hpp"
#include "sgx/seed.hpp"
#include "sgx/tensor.hpp"
#include "sgx/tud.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::string dataset;
  std::string strategy;
  double fraction = 1.0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string data_root;
  bool large = false;
  int threads = 0;
  std::vector<std::string> sets;

  CLI::Option* dataset_opt = nullptr;
  CLI::Option* strategy_opt = nullptr;
  CLI::Option* fraction_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "flat JSON config file")->check(CLI::ExistingFile);
  f.dataset_opt = app->add_option("--dataset", f.dataset, "dataset name (MUTAG, BA-2Motifs, ...)");
  f.strategy_opt = app->add_option("--strategy", f.strategy, "GIN | noise | topk | ED | ND");
  f.fraction_opt = app->add_option("--fraction", f.fraction, "share of each bag per epoch, in (0, 1]");
  f.seed_opt = app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  app->add_option("--data-root", f.data_root, "root of the TUD dataset directories");
  app->add_flag("--large", f.large, "allow PROTEINS, NCI1 and IMDB datasets");
  app->add_option("--threads", f.threads, "OpenMP threads (0 = runtime default)");
  app->add_option("--set", f.sets, "override a config key, key=value (value parsed as JSON)");
}

sgx::RunConfig build_config(const CommonFlags& f) {
  sgx::RunConfig cfg;
  if (!f.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(sgx::read_file(f.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw sgx::FormatError("config " + f.config + ": " + e.what());
    }
    cfg = sgx::config_from_json(j, cfg);
  }
  if (f.dataset_opt->count()) cfg.dataset = f.dataset;
  if (f.strategy_opt->count()) cfg.strategy = sgx::bag_strategy_from_string(f.strategy);
  if (f.fraction_opt->count()) cfg.bag_fraction = f.fraction;
  if (f.seed_opt->count()) cfg.seed = f.seed;
  if (!f.data_root.empty()) cfg.data_root = f.data_root;
  if (f.large) cfg.allow_large = true;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw sgx::ArgumentError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq), text = s.substr(eq + 1);
    nlohmann::json v = nlohmann::json::parse(text, nullptr, false);
    if (v.is_discarded()) v = text;  // bare strings
    sgx::apply_config_value(cfg, key, v);
  }
  cfg.validate();
  return cfg;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  sgx::write_file_atomic(path, j.dump(2) + "\n");
}

void export_heatmaps(const std::vector<sgx::ExplanationHeatmap>& maps, const fs::path& dir,
                     const std::vector<std::string>& formats) {
  fs::create_directories(dir);
  for (const auto& fmt : formats) {
    const auto kind = sgx::heatmap_format_from_string(fmt);
    for (const auto& h : maps) {
      sgx::export_heatmap(h, kind, dir / ("graph_" + std::to_string(h.graph_id) + "." + fmt));
    }
  }
}

sgx::NamedTensors model_tensors(const sgx::FoldRun& run) {
  auto out = sgx::with_prefix(run.backbone.named(), "backbone");
  if (run.explainer) {
    auto e = sgx::with_prefix(run.explainer->named(), "explainer");
    out.insert(out.end(), e.begin(), e.end());
  }
  if (run.dss) {
    auto d = sgx::with_prefix(run.dss->named(), "dss");
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

void write_histories(const sgx::FoldRun& run, const fs::path& dir, const std::string& tag) {
  sgx::write_file_atomic(dir / (tag + "backbone_history.jsonl"), sgx::history_to_jsonl(run.backbone_history));
  if (!run.explainer_history.empty()) {
    sgx::write_file_atomic(dir / (tag + "explainer_history.jsonl"),
                           sgx::history_to_jsonl(run.explainer_history));
  }
  if (!run.dss_history.empty()) {
    sgx::write_file_atomic(dir / (tag + "finetune_history.jsonl"), sgx::history_to_jsonl(run.dss_history));
  }
}

int cmd_gen(int n, std::uint64_t seed, const fs::path& out) {
  const auto ds = sgx::generate_ba2motifs(n, seed);
  const fs::path dir = out / "BA-2Motifs";
  fs::create_directories(dir);
  sgx::write_tud_dataset(ds, dir, "BA-2Motifs");
  sgx::write_motif_edges_json(ds, dir / "BA-2Motifs_motif_edges.json");
  std::cout << "wrote " << ds.size() << " graphs to " << dir.string() << "\n";
  return 0;
}

int cmd_train(const sgx::RunConfig& cfg, const fs::path& out, const std::vector<std::string>& formats) {
  fs::create_directories(out);
  const auto res = sgx::run_three_step(cfg);
  write_json(out / "report.json", res.report);
  sgx::save_checkpoint(model_tensors(res.run), out / "checkpoint.json");
  write_histories(res.run, out, "");
  if (!res.heatmaps.empty()) export_heatmaps(res.heatmaps, out / "heatmaps", formats);
  std::cout << "test accuracy " << res.report["final_test_accuracy"].get<double>() << " ("
            << res.run.test.size() << " graphs); outputs in " << out.string() << "\n";
  return 0;
}

int cmd_cv(const sgx::RunConfig& cfg, const fs::path& out, const std::string& name) {
  fs::create_directories(out);
  std::vector<sgx::FoldRun> runs;
  const auto rep = sgx::kfold_cv(cfg, nullptr, &runs);
  write_json(out / name, rep.to_json());
  for (const auto& r : runs) write_histories(r, out, "fold" + std::to_string(r.fold) + "_");
  std::printf("%s %s fraction=%.2f: %.2f +- %.2f (epoch %d, %.1fs)%s\n", rep.dataset.c_str(),
              rep.strategy.c_str(), rep.bag_fraction, 100.0 * rep.mean, 100.0 * rep.std,
              rep.selected_epoch, rep.wall_clock_seconds, rep.leakage_free ? "" : " LEAKAGE");
  return 0;
}

int cmd_grid(sgx::RunConfig cfg, const fs::path& out) {
  fs::create_directories(out);
  if (cfg.grid.empty()) cfg.grid = sgx::default_grid();
  sgx::BackboneCache cache;
  const auto res = sgx::grid_search(cfg, &cache);
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t i = 0; i < res.reports.size(); ++i) runs.push_back(res.reports[i].to_json());
  write_json(out / "grid_report.json",
             {{"best_index", res.best_index}, {"best_config", sgx::config_to_json(res.best)}, {"runs", runs}});
  const auto& b = res.reports[res.best_index];
  std::printf("best of %zu: %.2f +- %.2f\n%s\n", res.reports.size(), 100.0 * b.mean, 100.0 * b.std,
              sgx::config_to_json(res.best).dump().c_str());
  return 0;
}

int cmd_explain(const sgx::RunConfig& cfg, const fs::path& checkpoint, const fs::path& out,
                const std::vector<int>& graph_ids, const std::vector<std::string>& formats) {
  const auto ds = sgx::load_dataset(cfg);
  auto backbone = sgx::BackboneParams::init(ds.feature_dim(), ds.num_classes, 0);
  std::optional<sgx::ExplainerParams> explainer;
  auto tensors = sgx::with_prefix(backbone.named(), "backbone");
  if (sgx::uses_explainer(cfg.strategy)) {
    explainer = sgx::ExplainerParams::zeros(sgx::kHidden);
    auto e = sgx::with_prefix(explainer->named(), "explainer");
    tensors.insert(tensors.end(), e.begin(), e.end());
  }
  sgx::load_checkpoint(checkpoint, tensors);
  sgx::GraphDataset subset;
  if (graph_ids.empty()) {
    subset = ds;
  } else {
    subset.name = ds.name;
    subset.num_classes = ds.num_classes;
    subset.feature_spec = ds.feature_spec;
    for (int id : graph_ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= ds.size()) {
        throw sgx::ArgumentError("graph id " + std::to_string(id) + " out of range");
      }
      subset.graphs.push_back(ds.graphs[static_cast<std::size_t>(id)]);
    }
  }
  const auto bags = sgx::build_bags(subset, cfg, backbone, explainer ? &*explainer : nullptr,
                                    sgx::derive_seed({cfg.seed, 4, 0}));
  std::vector<sgx::ExplanationHeatmap> maps;
  for (const auto& b : bags) maps.push_back(sgx::aggregate_heatmap(b));
  export_heatmaps(maps, out, formats);
  std::cout << "wrote " << maps.size() << " heatmaps to " << out.string() << "\n";
  return 0;
}

std::string config_help() {
  std::ostringstream s;
  s << "\nConfig keys (flat JSON for --config, or --set key=value):\n";
  for (const auto& [k, d, text] : sgx::config_key_help()) {
    s << "  " << k << std::string(k.size() < 18 ? 18 - k.size() : 1, ' ') << text << " [default "
      << d << "]\n";
  }
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  sgx::keep_freed_buffers();
  CLI::App app{"Explanation-guided subgraph ensembles for graph classification"};
  app.footer(config_help());
  app.require_subcommand(1);

  // One flag set per subcommand so option counts stay per command.
  std::map<const CLI::App*, CommonFlags> flags;
  std::vector<std::string> formats{"json"};

  int n_graphs = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "data";
  auto* gen = app.add_subcommand("gen-ba2motifs", "write the synthetic two-motif dataset in TUD layout");
  gen->add_option("--num-graphs", n_graphs, "number of graphs (even)")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--out-dir", gen_out, "output root")->capture_default_str();

  auto* train = app.add_subcommand("train", "three-step training on a stratified holdout split");
  add_common(train, flags[train]);
  train->add_option("--heatmap-format", formats, "json, dot and/or svg")->capture_default_str();

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation of the configured strategy");
  add_common(cv, flags[cv]);

  auto* grid = app.add_subcommand("grid", "exhaustive grid search, each point cross-validated");
  add_common(grid, flags[grid]);

  std::string checkpoint;
  std::vector<int> graph_ids;
  auto* explain = app.add_subcommand("explain", "emit heatmaps from a trained checkpoint");
  add_common(explain, flags[explain]);
  explain->add_option("--checkpoint", checkpoint, "checkpoint.json written by train")
      ->required()
      ->check(CLI::ExistingFile);
  explain->add_option("--graphs", graph_ids, "dataset indices to explain (default: all)");
  explain->add_option("--heatmap-format", formats, "json, dot and/or svg")->capture_default_str();

  auto* baseline = app.add_subcommand("baseline", "cross-validated GIN, DSS-ED or DSS-ND baseline");
  add_common(baseline, flags[baseline]);

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const auto* cmd = app.get_subcommands().front();
  try {
    if (cmd == gen) return cmd_gen(n_graphs, gen_seed, gen_out);
    const CommonFlags& f = flags.at(cmd);
    if (f.threads > 0) omp_set_num_threads(f.threads);
    const auto cfg = build_config(f);
    const fs::path out(f.out_dir);
    if (cmd == train) return cmd_train(cfg, out, formats);
    if (cmd == cv) return cmd_cv(cfg, out, "cv_report.json");
    if (cmd == grid) return cmd_grid(cfg, out);
    if (cmd == explain) return cmd_explain(cfg, checkpoint, out, graph_ids, formats);
    if (cmd == baseline) {
      if (sgx::uses_explainer(cfg.strategy)) {
        throw sgx::ArgumentError("baseline expects --strategy GIN, ED or ND");
      }
      return cmd_cv(cfg, out, "baseline_report.json");
    }
  } catch (const sgx::StageError& e) {
    std::cerr << "sgx " << cmd->get_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const sgx::Error& e) {
    std::cerr << "sgx " << cmd->get_name() << ": [" << cmd->get_name() << "] " << e.kind()
              << " error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sgx " << cmd->get_name() << ": [" << cmd->get_name() << "] " << e.what() << "\n";
    return 1;
  }
  return 1;
}
