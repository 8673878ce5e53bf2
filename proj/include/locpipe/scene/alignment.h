#ifndef LOCPIPE_SCENE_ALIGNMENT_H_
#define LOCPIPE_SCENE_ALIGNMENT_H_

#include <span>

#include <Eigen/Core>

#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

// Least-squares rigid transform T with dst ~ T * src (Kabsch). The rotation
// is always proper: a reflection in the SVD solution is sign-corrected.
// Throws InvalidArgument on size mismatch or empty input.
RigidPose AlignPoints(std::span<const Eigen::Vector3d> src,
                      std::span<const Eigen::Vector3d> dst);

// Ratio of the second to the first singular value of the centred point
// set; ~0 for collinear or coincident points.
double PlanarityRatio(std::span<const Eigen::Vector3d> points);

}  // namespace locpipe

#endif  // LOCPIPE_SCENE_ALIGNMENT_H_
