#ifndef LOCPIPE_LOCALIZATION_PNP_H_
#define LOCPIPE_LOCALIZATION_PNP_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "locpipe/localization/correspondences.h"
#include "locpipe/scene/camera.h"
#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

inline constexpr double kDefaultPnpThreshold = 8.0;  // pixels
inline constexpr std::size_t kDefaultMinInliers = 12;

struct PnpOptions {
  double threshold = kDefaultPnpThreshold;
  std::size_t min_iterations = 20;
  std::size_t max_iterations = 10000;
  double confidence = 0.999;
  std::size_t min_inliers = kDefaultMinInliers;
  bool refine = true;
  std::uint64_t seed = 0;
};

struct PoseEstimate {
  RigidPose pose;
  std::vector<Correspondence2D3D> inliers;
  std::size_t num_correspondences = 0;
  double mean_error = 0.0;  // over inliers, pixels
  std::size_t cluster_id = 0;
  std::optional<double> perceptual_distance;

  std::size_t inlier_count() const { return inliers.size(); }
};

// Reprojection error in pixels on the distortion-free model; +inf when the
// point is not in front of the camera.
double ReprojectionError(const PinholeCamera& camera, const RigidPose& pose,
                         const Correspondence2D3D& c);

// Damped Gauss-Newton (Levenberg-Marquardt) on the summed squared
// reprojection error, with left-multiplicative pose updates.
RigidPose RefinePose(const PinholeCamera& camera, const RigidPose& initial,
                     std::span<const Correspondence2D3D> correspondences,
                     int max_iterations = 100);

// RANSAC over P3P hypotheses, then refinement on the inliers and a final
// inlier recount under the refined pose. The random stream is seeded from
// options.seed mixed with the correspondence content, so the same input
// always yields the same estimate. Throws TooFewCorrespondences (< 4) and
// NoPose (fewer than min_inliers inliers).
PoseEstimate EstimatePose(std::span<const Correspondence2D3D> correspondences,
                          const PinholeCamera& camera, const PnpOptions& options = {});

}  // namespace locpipe

#endif  // LOCPIPE_LOCALIZATION_PNP_H_
