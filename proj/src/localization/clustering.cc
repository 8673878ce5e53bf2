#include "locpipe/localization/clustering.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "locpipe/util/error.h"

namespace locpipe {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

const char* ClusterMethodName(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::kNone:
      return "none";
    case ClusterMethod::kPose:
      return "pose";
    case ClusterMethod::kCovisibility:
      return "covis";
  }
  return "?";
}

ClusterMethod ParseClusterMethod(const std::string& name) {
  for (ClusterMethod m : {ClusterMethod::kNone, ClusterMethod::kPose, ClusterMethod::kCovisibility}) {
    if (name == ClusterMethodName(m)) return m;
  }
  ThrowError(ErrorCode::kInvalidArgument, "unknown cluster method '" + name + "'");
}

std::vector<CameraCluster> ClusterCandidates(const SparseMap& map,
                                             std::span<const image_t> candidates,
                                             const ClusterOptions& options) {
  std::vector<image_t> ids;
  std::set<image_t> seen;
  for (image_t id : candidates) {
    map.Image(id);  // UnknownImage
    if (seen.insert(id).second) ids.push_back(id);
  }

  UnionFind uf(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      bool linked = false;
      switch (options.method) {
        case ClusterMethod::kNone:
          linked = true;
          break;
        case ClusterMethod::kPose:
          linked = (map.Image(ids[i]).pose.Center() - map.Image(ids[j]).pose.Center()).norm() <=
                   options.pose_radius;
          break;
        case ClusterMethod::kCovisibility:
          linked = map.Covisibility(ids[i], ids[j]) >= std::max<std::size_t>(options.covis_threshold, 1);
          break;
      }
      if (linked) uf.Union(i, j);
    }
  }

  // Roots are the smallest index in each component, i.e. the best-ranked
  // member, so iterating in rank order numbers clusters by first appearance.
  std::vector<CameraCluster> clusters;
  std::vector<std::size_t> cluster_of_root(ids.size(), SIZE_MAX);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t root = uf.Find(i);
    if (cluster_of_root[root] == SIZE_MAX) {
      cluster_of_root[root] = clusters.size();
      clusters.push_back({clusters.size(), options.method, {}});
    }
    clusters[cluster_of_root[root]].members.push_back(ids[i]);
  }
  for (auto& c : clusters) std::sort(c.members.begin(), c.members.end());
  return clusters;
}

std::vector<PoseEstimate> LocalizeClusterwise(std::span<const Keypoint> query_keypoints,
                                              const PinholeCamera& query_camera,
                                              std::span<const RerankedCandidate> candidates,
                                              std::span<const CameraCluster> clusters,
                                              const SparseMap& map,
                                              const PnpOptions& options) {
  if (clusters.empty()) ThrowError(ErrorCode::kNoPose, "no candidate clusters");
  std::vector<PoseEstimate> estimates;
  std::string failures;
  for (const CameraCluster& cluster : clusters) {
    std::vector<RerankedCandidate> subset;
    for (const RerankedCandidate& c : candidates) {
      if (std::binary_search(cluster.members.begin(), cluster.members.end(), c.image_id)) {
        subset.push_back(c);
      }
    }
    const auto correspondences = BuildCorrespondences(query_keypoints, subset, map, &query_camera);
    try {
      PoseEstimate e = EstimatePose(correspondences, query_camera, options);
      e.cluster_id = cluster.id;
      estimates.push_back(std::move(e));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNoPose && err.code() != ErrorCode::kTooFewCorrespondences) {
        throw;
      }
      failures += " [cluster " + std::to_string(cluster.id) + ": " + err.what() + "]";
    }
  }
  if (estimates.empty()) ThrowError(ErrorCode::kNoPose, "every cluster failed:" + failures);
  // Cluster ids depend on the input order; the smallest member id does not,
  // so it is the final tie-break.
  std::map<std::size_t, image_t> first_member;
  for (const auto& c : clusters) first_member[c.id] = c.members.empty() ? 0 : c.members.front();
  std::sort(estimates.begin(), estimates.end(), [&](const PoseEstimate& a, const PoseEstimate& b) {
    return std::make_tuple(b.inlier_count(), a.mean_error, first_member[a.cluster_id]) <
           std::make_tuple(a.inlier_count(), b.mean_error, first_member[b.cluster_id]);
  });
  return estimates;
}

}  // namespace locpipe
