// locpipe: command-line front end. Every stage works on a workspace
// directory; see include/locpipe/harness/pipeline.h for its layout.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locpipe/harness/config.h"
#include "locpipe/harness/evaluation.h"
#include "locpipe/harness/pipeline.h"
#include "locpipe/harness/synthetic.h"
#include "locpipe/util/error.h"

namespace {

using locpipe::Config;
using locpipe::Workspace;

constexpr int kExitNoPose = 2;

struct Common {
  std::string workspace = ".";
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool allow_failures = false;
};

void AddCommon(CLI::App* cmd, Common* c) {
  cmd->add_option("-w,--workspace", c->workspace, "Workspace directory")->capture_default_str();
  cmd->add_option("-c,--config", c->config_file, "Config file merged over the workspace config");
  cmd->add_option("-s,--set", c->sets, "Override one setting, key=value (repeatable)");
  cmd->add_option("--seed", c->seed, "Global seed (seed)");
  cmd->add_option("--threads", c->threads, "Worker threads, 0 = all cores (pipeline.threads)");
  cmd->add_flag("--allow-failures", c->allow_failures,
                "Exit 0 even if some queries fail (pipeline.allow_failures)");
}

// defaults < workspace config.txt < --config < flags and --set.
Config BuildConfig(const Common& c, bool use_workspace_config) {
  Config config = use_workspace_config ? locpipe::LoadWorkspaceConfig(Workspace{c.workspace}) : Config();
  if (!c.config_file.empty()) config.Merge(c.config_file);
  if (c.seed) config.Set("seed", std::to_string(*c.seed));
  if (c.threads) config.Set("pipeline.threads", std::to_string(*c.threads));
  if (c.allow_failures) config.Set("pipeline.allow_failures", "true");
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      locpipe::ThrowError(locpipe::ErrorCode::kInvalidArgument, "--set expects key=value, got '" + kv + "'");
    }
    config.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

void PrintWarnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int FailureStatus(std::size_t failures, std::size_t queries, const Config& config) {
  if (failures == 0) return 0;
  std::cerr << failures << " of " << queries << " queries not localized\n";
  return config.GetBool("pipeline.allow_failures") ? 0 : kExitNoPose;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-map visual localization pipeline"};
  app.require_subcommand(1);
  Common common;
  int status = 0;
  std::function<void()> action;

  // synth generate
  auto* synth = app.add_subcommand("synth", "Synthetic scenes");
  synth->require_subcommand(1);
  auto* generate = synth->add_subcommand("generate", "Write a synthetic scene workspace");
  AddCommon(generate, &common);
  std::optional<std::string> layout;
  std::optional<std::size_t> num_points, num_db, num_queries;
  std::optional<double> noise_px, distractors;
  bool render = false;
  generate->add_option("--layout", layout, "default, repetitive or textured (synth.layout)");
  generate->add_option("--points", num_points, "synth.num_points");
  generate->add_option("--db", num_db, "synth.num_db");
  generate->add_option("--queries", num_queries, "synth.num_queries");
  generate->add_option("--noise-px", noise_px, "synth.noise_px");
  generate->add_option("--distractors", distractors, "synth.distractor_fraction");
  generate->add_flag("--render", render, "synth.render");
  generate->callback([&] {
    action = [&] {
      Config config = BuildConfig(common, false);
      if (layout) config.Set("synth.layout", *layout);
      if (num_points) config.Set("synth.num_points", std::to_string(*num_points));
      if (num_db) config.Set("synth.num_db", std::to_string(*num_db));
      if (num_queries) config.Set("synth.num_queries", std::to_string(*num_queries));
      if (noise_px) config.Set("synth.noise_px", std::to_string(*noise_px));
      if (distractors) config.Set("synth.distractor_fraction", std::to_string(*distractors));
      if (render) config.Set("synth.render", "true");
      const auto scene = locpipe::GenerateScene(locpipe::SceneSpec::FromConfig(config));
      locpipe::WriteSyntheticWorkspace(scene, Workspace{common.workspace}, config);
      std::cout << "scene: " << scene.map.Points().size() << " points, " << scene.map.Images().size()
                << " db images, " << scene.queries.size() << " queries, diameter " << scene.diameter
                << "\n";
    };
  });

  // map ingest | refine | pairs
  auto* map = app.add_subcommand("map", "Map operations");
  map->require_subcommand(1);
  auto* ingest = map->add_subcommand("ingest", "Copy a COLMAP text model into the workspace");
  AddCommon(ingest, &common);
  std::string colmap_dir;
  ingest->add_option("colmap_dir", colmap_dir, "COLMAP text model directory")->required();
  ingest->callback([&] {
    action = [&] { locpipe::IngestMap(colmap_dir, Workspace{common.workspace}); };
  });
  auto* refine = map->add_subcommand("refine", "Drop points with large uncertainty");
  AddCommon(refine, &common);
  std::optional<double> sigma_mult, sigma_threshold;
  std::optional<std::size_t> min_track;
  refine->add_option("--sigma-mult", sigma_mult, "mapping.sigma_mult");
  refine->add_option("--sigma-threshold", sigma_threshold, "mapping.sigma_threshold");
  refine->add_option("--min-track", min_track, "mapping.min_track");
  refine->callback([&] {
    action = [&] {
      Config config = BuildConfig(common, true);
      if (sigma_mult) config.Set("mapping.sigma_mult", std::to_string(*sigma_mult));
      if (sigma_threshold) config.Set("mapping.sigma_threshold", std::to_string(*sigma_threshold));
      if (min_track) config.Set("mapping.min_track", std::to_string(*min_track));
      const auto report = locpipe::RefineMapStage(Workspace{common.workspace}, config);
      std::cout << "kept " << report.kept << ", rejected " << report.rejected << ", threshold "
                << report.threshold << "\n";
    };
  });
  auto* pairs = map->add_subcommand("pairs", "Write image pairs for matching");
  AddCommon(pairs, &common);
  std::optional<std::string> pair_sources;
  pairs->add_option("--sources", pair_sources, "Comma list of pose, covis, global, temporal (mapping.pairs)");
  pairs->callback([&] {
    action = [&] {
      Config config = BuildConfig(common, true);
      if (pair_sources) config.Set("mapping.pairs", *pair_sources);
      std::cout << locpipe::PairsStage(Workspace{common.workspace}, config) << " pairs\n";
    };
  });

  // Localization stages.
  auto* retrieve = app.add_subcommand("retrieve", "Global retrieval and match-count reranking");
  AddCommon(retrieve, &common);
  std::optional<std::size_t> m, n;
  retrieve->add_option("-m", m, "Retrieved candidates (retrieval.m)");
  retrieve->add_option("-n", n, "Candidates kept after reranking (retrieval.n)");
  retrieve->callback([&] {
    action = [&] {
      Config config = BuildConfig(common, true);
      if (m) config.Set("retrieval.m", std::to_string(*m));
      if (n) config.Set("retrieval.n", std::to_string(*n));
      locpipe::RetrieveStage(Workspace{common.workspace}, config);
    };
  });
  auto* localize = app.add_subcommand("localize", "Cluster-wise PnP for every query");
  AddCommon(localize, &common);
  std::optional<std::string> cluster_method, rerank_mode;
  localize->add_option("--cluster", cluster_method, "none, pose or covis (cluster.method)");
  localize->add_option("--rerank", rerank_mode, "inlier or perceptual (rerank.mode)");
  localize->callback([&] {
    action = [&] {
      Config config = BuildConfig(common, true);
      if (cluster_method) config.Set("cluster.method", *cluster_method);
      if (rerank_mode) config.Set("rerank.mode", *rerank_mode);
      const auto s = locpipe::LocalizeStage(Workspace{common.workspace}, config);
      status = FailureStatus(s.failures, s.queries, config);
    };
  });
  auto* icp = app.add_subcommand("refine-icp", "Depth-based ICP refinement (when icp.enabled)");
  AddCommon(icp, &common);
  bool icp_enable = false;
  icp->add_flag("--enable", icp_enable, "icp.enabled");
  icp->callback([&] {
    action = [&] {
      Config config = BuildConfig(common, true);
      if (icp_enable) config.Set("icp.enabled", "true");
      PrintWarnings(locpipe::RefineIcpStage(Workspace{common.workspace}, config).warnings);
    };
  });
  auto* evaluate = app.add_subcommand("evaluate", "Compare poses.txt with gt_poses.txt");
  AddCommon(evaluate, &common);
  bool allow_missing = false;
  evaluate->add_flag("--allow-missing", allow_missing, "eval.allow_missing");
  evaluate->callback([&] {
    action = [&] {
      Config config = BuildConfig(common, true);
      if (allow_missing) config.Set("eval.allow_missing", "true");
      std::cout << locpipe::FormatEvalSummary(locpipe::EvaluateStage(Workspace{common.workspace}, config));
    };
  });
  auto* pipeline = app.add_subcommand("pipeline", "All localization stages in one process");
  AddCommon(pipeline, &common);
  pipeline->callback([&] {
    action = [&] {
      const Config config = BuildConfig(common, true);
      const auto result = locpipe::RunPipeline(Workspace{common.workspace}, config);
      PrintWarnings(result.warnings);
      if (result.report) std::cout << locpipe::FormatEvalSummary(*result.report);
      status = FailureStatus(result.failures, result.queries, config);
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    if (action) action();
  } catch (const locpipe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
