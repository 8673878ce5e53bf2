#ifndef LOCPIPE_LOCALIZATION_CORRESPONDENCES_H_
#define LOCPIPE_LOCALIZATION_CORRESPONDENCES_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "locpipe/matching/features.h"
#include "locpipe/retrieval/retrieval.h"
#include "locpipe/scene/sparse_map.h"

namespace locpipe {

struct Correspondence2D3D {
  std::uint32_t query_keypoint = 0;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();  // undistorted
  point3D_t point_id = 0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  image_t db_image = 0;
};

// Lifts query<->database keypoint matches to 2D-3D through the database
// images' observations. Matches whose database keypoint has no point are
// dropped; repeated (query keypoint, point) pairs keep the first candidate
// in input order. Output is sorted by (query keypoint, point id). With
// `query_camera`, pixels outside its image are dropped.
std::vector<Correspondence2D3D> BuildCorrespondences(
    std::span<const Keypoint> query_keypoints,
    std::span<const RerankedCandidate> candidates, const SparseMap& map,
    const PinholeCamera* query_camera = nullptr);

}  // namespace locpipe

#endif  // LOCPIPE_LOCALIZATION_CORRESPONDENCES_H_
