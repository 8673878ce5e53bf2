#include "locpipe/scene/rigid_pose.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace locpipe {

RigidPose::RigidPose()
    : rotation_(Eigen::Quaterniond::Identity()),
      translation_(Eigen::Vector3d::Zero()) {}

RigidPose::RigidPose(const Eigen::Quaterniond& rotation,
                     const Eigen::Vector3d& translation)
    : rotation_(rotation.normalized()), translation_(translation) {}

RigidPose RigidPose::FromMatrix(const Eigen::Matrix3d& rotation,
                                const Eigen::Vector3d& translation) {
  return RigidPose(Eigen::Quaterniond(rotation), translation);
}

RigidPose RigidPose::FromCenter(const Eigen::Matrix3d& rotation,
                                const Eigen::Vector3d& center) {
  return FromMatrix(rotation, -rotation * center);
}

Eigen::Matrix3d RigidPose::RotationMatrix() const {
  return rotation_.toRotationMatrix();
}

Eigen::Matrix<double, 3, 4> RigidPose::Matrix() const {
  Eigen::Matrix<double, 3, 4> m;
  m.leftCols<3>() = RotationMatrix();
  m.col(3) = translation_;
  return m;
}

Eigen::Vector3d RigidPose::Center() const {
  return -(rotation_.conjugate() * translation_);
}

RigidPose RigidPose::Inverse() const {
  const Eigen::Quaterniond inv = rotation_.conjugate();
  return RigidPose(inv, -(inv * translation_));
}

Eigen::Vector3d RigidPose::operator*(const Eigen::Vector3d& point) const {
  return rotation_ * point + translation_;
}

RigidPose Compose(const RigidPose& a, const RigidPose& b) {
  return RigidPose(a.rotation() * b.rotation(),
                   a.rotation() * b.translation() + a.translation());
}

double RotationAngleDeg(const Eigen::Quaterniond& a,
                        const Eigen::Quaterniond& b) {
  const Eigen::Quaterniond d = a.normalized() * b.normalized().conjugate();
  // atan2 form stays accurate near 0 and 180 degrees.
  const double s = d.vec().norm();
  const double c = std::abs(d.w());
  return 2.0 * std::atan2(s, c) * 180.0 / std::numbers::pi;
}

}  // namespace locpipe
