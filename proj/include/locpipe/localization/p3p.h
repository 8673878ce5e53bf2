#ifndef LOCPIPE_LOCALIZATION_P3P_H_
#define LOCPIPE_LOCALIZATION_P3P_H_

#include <array>
#include <vector>

#include <Eigen/Core>

#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

// Minimal absolute pose from three unit bearing vectors (camera frame) and
// their world points, via Grunert's quartic. Returns up to four poses with
// all three points in front of the camera; empty for degenerate input.
std::vector<RigidPose> SolveP3P(const std::array<Eigen::Vector3d, 3>& bearings,
                                const std::array<Eigen::Vector3d, 3>& points);

// Real roots of c[0] x^4 + c[1] x^3 + c[2] x^2 + c[3] x + c[4].
std::vector<double> SolveQuartic(const Eigen::Matrix<double, 5, 1>& c);

}  // namespace locpipe

#endif  // LOCPIPE_LOCALIZATION_P3P_H_
