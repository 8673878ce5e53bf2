#ifndef LOCPIPE_HARNESS_PIPELINE_H_
#define LOCPIPE_HARNESS_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locpipe/harness/config.h"
#include "locpipe/harness/evaluation.h"
#include "locpipe/harness/synthetic.h"
#include "locpipe/mapping/uncertainty.h"
#include "locpipe/scene/camera.h"

namespace locpipe {

// Workspace directory layout. Every stage reads and writes only these files.
//   map/                      COLMAP text model (+ timestamps.txt)
//   features/<image>.lfs      local features, database and query images
//   global/<image>.gds        named global descriptor parts
//   queries.txt               "name MODEL width height params..."
//   gt_poses.txt              ground truth, submission format (optional)
//   images/<image>.pgm        16-bit intensity images (optional)
//   depth/<image>.dpt         depth rasters (optional)
//   scene_info.txt            "diameter D" (synthetic scenes)
//   config.txt                settings used to create the workspace
//   retrieval.txt             "query db retrieval_rank num_matches", reranked
//   localize_log.txt          per-query localization record
//   poses_pnp.txt             localization output
//   poses.txt                 final output after optional ICP
//   warnings.txt              ICP stage warnings
//   report.txt                evaluation
//   timings.txt               "stage seconds" (pipeline runs only)
struct Workspace {
  std::filesystem::path root;

  std::filesystem::path MapDir() const { return root / "map"; }
  std::filesystem::path Features(const std::string& image) const;
  std::filesystem::path Global(const std::string& image) const;
  std::filesystem::path Image(const std::string& image) const;
  std::filesystem::path Depth(const std::string& image) const;
  std::filesystem::path File(const std::string& name) const { return root / name; }
};

struct QueryInfo {
  std::string name;
  PinholeCamera camera;
  CameraModel model = CameraModel::kPinhole;
};

std::vector<QueryInfo> ReadQueries(const std::filesystem::path& path);
void WriteQueries(const std::filesystem::path& path, const std::vector<QueryInfo>& queries);

// Loads <root>/config.txt when present, otherwise defaults.
Config LoadWorkspaceConfig(const Workspace& ws);

void WriteSyntheticWorkspace(const SyntheticScene& scene, const Workspace& ws,
                             const Config& config);

// Validates a COLMAP text model and copies it into the workspace.
void IngestMap(const std::filesystem::path& colmap_dir, const Workspace& ws);

// Uncertainty-based point filtering of the workspace map, in place; writes
// refine_report.txt.
RefineReport RefineMapStage(const Workspace& ws, const Config& config);

// Writes pairs.txt from the mapping.pairs source list; returns the pair count.
std::size_t PairsStage(const Workspace& ws, const Config& config);

struct StageSummary {
  std::size_t queries = 0;
  std::size_t failures = 0;
  std::vector<std::string> warnings;
};

StageSummary RetrieveStage(const Workspace& ws, const Config& config);
StageSummary LocalizeStage(const Workspace& ws, const Config& config);
StageSummary RefineIcpStage(const Workspace& ws, const Config& config);
EvalReport EvaluateStage(const Workspace& ws, const Config& config);

struct PipelineResult {
  std::size_t queries = 0;
  std::size_t failures = 0;
  std::vector<std::string> warnings;
  std::optional<EvalReport> report;  // when gt_poses.txt exists
  std::vector<std::pair<std::string, double>> timings;
};

// (optional map refine) -> retrieve -> localize -> refine-icp -> evaluate,
// running the same stage functions as the separate CLI commands. Errors are
// rethrown with the stage name prefixed.
PipelineResult RunPipeline(const Workspace& ws, const Config& config);

}  // namespace locpipe

#endif  // LOCPIPE_HARNESS_PIPELINE_H_
