#ifndef LOCPIPE_POSE_REFINE_ICP_H_
#define LOCPIPE_POSE_REFINE_ICP_H_

#include <optional>
#include <vector>

#include "locpipe/pose_refine/point_cloud.h"
#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

struct IcpOptions {
  int max_iterations = 100;
  double trim = 0.2;  // fraction of worst correspondences dropped
  // RMS change below which iteration stops; default 1e-6 x target diameter.
  std::optional<double> tolerance;
};

struct IcpResult {
  RigidPose pose;  // refined world->camera pose
  // Trimmed RMS over the kept correspondences at the start of each
  // iteration, plus the value under the final pose. Non-increasing.
  std::vector<double> rms;
  int iterations = 0;
  bool converged = false;
};

// Trimmed point-to-point ICP. `source` is in the camera frame of `initial`
// (world->camera); `target` is a world-frame cloud. Throws DegenerateCloud
// (fewer than 3 points, or collinear/coincident), Diverged (final RMS above
// the initial RMS), InvalidArgument (trim outside [0, 1)).
IcpResult IcpRefine(const PointCloud& source, const KdTree& target, const RigidPose& initial,
                    const IcpOptions& options = {});

}  // namespace locpipe

#endif  // LOCPIPE_POSE_REFINE_ICP_H_
