#ifndef LOCPIPE_SCENE_RIGID_POSE_H_
#define LOCPIPE_SCENE_RIGID_POSE_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace locpipe {

// Rigid transform mapping world points into the camera frame:
//   p_c = R * p_w + t.
// The rotation is stored as a unit quaternion; it is renormalized on every
// construction so that |q| = 1 holds to machine precision.
class RigidPose {
 public:
  RigidPose();
  RigidPose(const Eigen::Quaterniond& rotation,
            const Eigen::Vector3d& translation);

  static RigidPose FromMatrix(const Eigen::Matrix3d& rotation,
                              const Eigen::Vector3d& translation);
  // Builds the pose of a camera at `center` with world->camera rotation R.
  static RigidPose FromCenter(const Eigen::Matrix3d& rotation,
                              const Eigen::Vector3d& center);

  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Matrix3d RotationMatrix() const;
  Eigen::Matrix<double, 3, 4> Matrix() const;

  // Camera center in world coordinates, -R^T t.
  Eigen::Vector3d Center() const;

  RigidPose Inverse() const;

  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const;

 private:
  Eigen::Quaterniond rotation_;
  Eigen::Vector3d translation_;
};

// (a o b)(p) = a(b(p)).
RigidPose Compose(const RigidPose& a, const RigidPose& b);

// Rotation angle between two rotations in degrees, in [0, 180].
double RotationAngleDeg(const Eigen::Quaterniond& a,
                        const Eigen::Quaterniond& b);

}  // namespace locpipe

#endif  // LOCPIPE_SCENE_RIGID_POSE_H_
