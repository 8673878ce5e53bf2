#include "locpipe/scene/camera.h"

#include <cmath>
#include <sstream>

#include "locpipe/util/error.h"

namespace locpipe {

void PinholeCamera::Validate() const {
  const bool ok = fx > 0.0 && fy > 0.0 && width > 0 && height > 0 &&
                  cx > 0.0 && cx < width && cy > 0.0 && cy < height &&
                  distortion.allFinite();
  if (!ok) {
    std::ostringstream msg;
    msg << "invalid pinhole camera fx=" << fx << " fy=" << fy << " cx=" << cx
        << " cy=" << cy << " size=" << width << "x" << height;
    ThrowError(ErrorCode::kInvalidArgument, msg.str());
  }
}

Eigen::Matrix3d PinholeCamera::K() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Vector2d PinholeCamera::ImageToNormalized(
    const Eigen::Vector2d& pixel) const {
  return {(pixel.x() - cx) / fx, (pixel.y() - cy) / fy};
}

Eigen::Vector2d PinholeCamera::NormalizedToImage(
    const Eigen::Vector2d& normalized) const {
  return {fx * normalized.x() + cx, fy * normalized.y() + cy};
}

bool PinholeCamera::InImage(const Eigen::Vector2d& pixel) const {
  return pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() <= width &&
         pixel.y() <= height;
}

Eigen::Vector2d DistortNormalized(const Eigen::Vector4d& coeffs,
                                  const Eigen::Vector2d& xy) {
  const double k1 = coeffs[0], k2 = coeffs[1], p1 = coeffs[2], p2 = coeffs[3];
  const double x = xy.x(), y = xy.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
  return {x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x),
          y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y};
}

Eigen::Matrix2d DistortNormalizedJacobian(const Eigen::Vector4d& coeffs,
                                          const Eigen::Vector2d& xy) {
  const double k1 = coeffs[0], k2 = coeffs[1], p1 = coeffs[2], p2 = coeffs[3];
  const double x = xy.x(), y = xy.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
  const double dradial_dr2 = k1 + 2.0 * k2 * r2;
  Eigen::Matrix2d j;
  j(0, 0) = radial + 2.0 * x * x * dradial_dr2 + 2.0 * p1 * y + 6.0 * p2 * x;
  j(0, 1) = 2.0 * x * y * dradial_dr2 + 2.0 * p1 * x + 2.0 * p2 * y;
  j(1, 0) = 2.0 * x * y * dradial_dr2 + 2.0 * p1 * x + 2.0 * p2 * y;
  j(1, 1) = radial + 2.0 * y * y * dradial_dr2 + 6.0 * p1 * y + 2.0 * p2 * x;
  return j;
}

Eigen::Vector2d ProjectCameraPoint(const PinholeCamera& camera,
                                   const Eigen::Vector3d& point_camera) {
  if (!(point_camera.z() > 0.0)) {
    std::ostringstream msg;
    msg << "point at camera depth " << point_camera.z();
    ThrowError(ErrorCode::kCheiralityViolation, msg.str());
  }
  Eigen::Vector2d xy = point_camera.head<2>() / point_camera.z();
  if (camera.HasDistortion()) {
    xy = DistortNormalized(camera.distortion, xy);
  }
  return camera.NormalizedToImage(xy);
}

Eigen::Vector2d Project(const PinholeCamera& camera, const RigidPose& pose,
                        const Eigen::Vector3d& point_world) {
  return ProjectCameraPoint(camera, pose * point_world);
}

Eigen::Vector3d Unproject(const PinholeCamera& camera, const RigidPose& pose,
                          const Eigen::Vector2d& pixel, double depth) {
  const Eigen::Vector2d xy = camera.ImageToNormalized(pixel);
  const Eigen::Vector3d point_camera(xy.x() * depth, xy.y() * depth, depth);
  return pose.Inverse() * point_camera;
}

Eigen::Vector3d PixelRayWorld(const PinholeCamera& camera,
                              const RigidPose& pose,
                              const Eigen::Vector2d& pixel) {
  const Eigen::Vector2d xy = camera.ImageToNormalized(pixel);
  return (pose.rotation().conjugate() * Eigen::Vector3d(xy.x(), xy.y(), 1.0))
      .normalized();
}

}  // namespace locpipe
