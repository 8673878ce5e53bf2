#include "locpipe/localization/correspondences.h"

#include <map>

#include "locpipe/util/error.h"

namespace locpipe {

std::vector<Correspondence2D3D> BuildCorrespondences(
    std::span<const Keypoint> query_keypoints,
    std::span<const RerankedCandidate> candidates, const SparseMap& map,
    const PinholeCamera* query_camera) {
  std::map<std::pair<std::uint32_t, point3D_t>, Correspondence2D3D> merged;
  for (const RerankedCandidate& candidate : candidates) {
    const PosedImage& image = map.Image(candidate.image_id);
    for (const FeatureMatch& m : candidate.matches.matches) {
      if (m.a >= query_keypoints.size()) {
        ThrowError(ErrorCode::kInvalidArgument, "match references missing query keypoint");
      }
      const auto obs = image.observed_points.find(m.b);
      if (obs == image.observed_points.end()) continue;
      const Eigen::Vector2d pixel(query_keypoints[m.a].x, query_keypoints[m.a].y);
      if (query_camera && !query_camera->InImage(pixel)) continue;
      Correspondence2D3D c;
      c.query_keypoint = m.a;
      c.pixel = pixel;
      c.point_id = obs->second;
      c.point = map.Point(obs->second).position;
      c.db_image = candidate.image_id;
      merged.emplace(std::make_pair(c.query_keypoint, c.point_id), c);
    }
  }
  std::vector<Correspondence2D3D> out;
  out.reserve(merged.size());
  for (auto& [key, c] : merged) out.push_back(std::move(c));
  return out;
}

}  // namespace locpipe
