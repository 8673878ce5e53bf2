#ifndef LOCPIPE_HARNESS_EVALUATION_H_
#define LOCPIPE_HARNESS_EVALUATION_H_

#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "locpipe/scene/colmap_io.h"
#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

struct PoseError {
  double rotation_deg = 0.0;  // angle of R_est * R_gt^T, in [0, 180]
  double translation = 0.0;   // camera centre distance
};

PoseError ComputePoseError(const RigidPose& estimate, const RigidPose& ground_truth);

// A query counts as localized at (translation, rotation_deg) when both errors
// are within the bounds.
struct ErrorThreshold {
  double translation = 0.0;
  double rotation_deg = 0.0;
};

// "t:r,t:r,..." e.g. "0.25:2,0.5:5,5:10". Throws ParseError.
std::vector<ErrorThreshold> ParseThresholds(const std::string& text);
std::vector<ErrorThreshold> DefaultThresholds();

struct QueryResult {
  std::string name;
  bool localized = false;  // false when the estimate is missing
  PoseError error{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
};

struct EvalReport {
  std::vector<QueryResult> queries;  // sorted by name
  std::vector<ErrorThreshold> thresholds;
  std::vector<double> recall;  // one per threshold
  std::vector<std::pair<std::string, double>> timings;  // stage, seconds (not in the report file)
};

// Every ground-truth query needs an estimate and every estimate a ground
// truth, otherwise NameMismatch names the first offending query. With
// `allow_missing`, absent estimates count as failures instead.
EvalReport Evaluate(const std::vector<NamedPose>& estimates,
                    const std::vector<NamedPose>& ground_truth,
                    const std::vector<ErrorThreshold>& thresholds,
                    bool allow_missing = false);

// Per-query lines "name rot_deg trans" then "# recall t r value" lines.
void WriteEvalReport(const std::filesystem::path& path, const EvalReport& report);
std::string FormatEvalSummary(const EvalReport& report);

}  // namespace locpipe

#endif  // LOCPIPE_HARNESS_EVALUATION_H_
