#ifndef LOCPIPE_MAPPING_TRIANGULATION_H_
#define LOCPIPE_MAPPING_TRIANGULATION_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "locpipe/scene/camera.h"
#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

// Pixel observations are expected undistorted; the camera is used as a pure
// pinhole.
struct TriangulationObservation {
  PinholeCamera camera;
  RigidPose pose;
  Eigen::Vector2d pixel;
};

struct TriangulatedPoint {
  Eigen::Vector3d position;
  std::vector<double> residuals;  // reprojection error per view, pixels

  double RmsResidual() const;
};

// Linear (DLT) triangulation in normalized coordinates. Throws
// InvalidArgument (< 2 observations), DegenerateGeometry (all rays parallel
// or all centres coincident), CheiralityViolation.
TriangulatedPoint Triangulate(std::span<const TriangulationObservation> observations);

}  // namespace locpipe

#endif  // LOCPIPE_MAPPING_TRIANGULATION_H_
