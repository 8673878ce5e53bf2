#ifndef LOCPIPE_SCENE_CAMERA_H_
#define LOCPIPE_SCENE_CAMERA_H_

#include <Eigen/Core>

#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

// Pinhole intrinsics with an optional 4-parameter radial-tangential
// distortion (k1, k2, p1, p2) applied in normalized image coordinates.
struct PinholeCamera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  int width = 1;
  int height = 1;
  Eigen::Vector4d distortion = Eigen::Vector4d::Zero();

  // Throws InvalidArgument unless fx, fy > 0 and the principal point lies
  // strictly inside the image.
  void Validate() const;

  bool HasDistortion() const { return !distortion.isZero(0.0); }

  Eigen::Matrix3d K() const;

  Eigen::Vector2d ImageToNormalized(const Eigen::Vector2d& pixel) const;
  Eigen::Vector2d NormalizedToImage(const Eigen::Vector2d& normalized) const;

  bool InImage(const Eigen::Vector2d& pixel) const;

  bool operator==(const PinholeCamera&) const = default;
};

Eigen::Vector2d DistortNormalized(const Eigen::Vector4d& coeffs,
                                  const Eigen::Vector2d& xy);
// d(distorted)/d(xy).
Eigen::Matrix2d DistortNormalizedJacobian(const Eigen::Vector4d& coeffs,
                                          const Eigen::Vector2d& xy);

// Projects a camera-frame point. Throws CheiralityViolation when z <= 0.
Eigen::Vector2d ProjectCameraPoint(const PinholeCamera& camera,
                                   const Eigen::Vector3d& point_camera);

// Projects a world point through `pose` (world->camera). Distortion is
// applied when the camera has nonzero coefficients.
Eigen::Vector2d Project(const PinholeCamera& camera, const RigidPose& pose,
                        const Eigen::Vector3d& point_world);

// Inverse of Project on the distortion-free model: returns the world point
// at camera-frame depth `depth` along the ray through `pixel`.
Eigen::Vector3d Unproject(const PinholeCamera& camera, const RigidPose& pose,
                          const Eigen::Vector2d& pixel, double depth);

// World-frame unit ray direction through an (undistorted) pixel.
Eigen::Vector3d PixelRayWorld(const PinholeCamera& camera,
                              const RigidPose& pose,
                              const Eigen::Vector2d& pixel);

}  // namespace locpipe

#endif  // LOCPIPE_SCENE_CAMERA_H_
