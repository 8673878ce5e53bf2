#ifndef LOCPIPE_LOCALIZATION_CLUSTERING_H_
#define LOCPIPE_LOCALIZATION_CLUSTERING_H_

#include <span>
#include <string>
#include <vector>

#include "locpipe/localization/pnp.h"
#include "locpipe/matching/features.h"
#include "locpipe/retrieval/retrieval.h"
#include "locpipe/scene/sparse_map.h"

namespace locpipe {

enum class ClusterMethod { kNone, kPose, kCovisibility };

const char* ClusterMethodName(ClusterMethod method);
ClusterMethod ParseClusterMethod(const std::string& name);

struct ClusterOptions {
  ClusterMethod method = ClusterMethod::kPose;
  double pose_radius = 5.0;        // scene units, camera centres only
  std::size_t covis_threshold = 10;  // shared points
};

struct CameraCluster {
  std::size_t id = 0;
  ClusterMethod method = ClusterMethod::kPose;
  std::vector<image_t> members;  // ascending
};

// Connected components of the candidates under the chosen linkage. Clusters
// are numbered in order of their best-ranked member in `candidates`; kNone
// puts every candidate in one cluster. Duplicate candidates are ignored.
std::vector<CameraCluster> ClusterCandidates(const SparseMap& map,
                                             std::span<const image_t> candidates,
                                             const ClusterOptions& options);

// One PnP per cluster over that cluster's candidates' matches. Estimates are
// ranked by inlier count (descending), then mean reprojection error, then
// cluster id. Clusters that fail are left out. Throws NoPose when all fail.
std::vector<PoseEstimate> LocalizeClusterwise(std::span<const Keypoint> query_keypoints,
                                              const PinholeCamera& query_camera,
                                              std::span<const RerankedCandidate> candidates,
                                              std::span<const CameraCluster> clusters,
                                              const SparseMap& map,
                                              const PnpOptions& options = {});

}  // namespace locpipe

#endif  // LOCPIPE_LOCALIZATION_CLUSTERING_H_
