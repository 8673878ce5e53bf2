#ifndef LOCPIPE_TESTS_TEST_UTIL_H_
#define LOCPIPE_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "locpipe/scene/rigid_pose.h"

namespace locpipe::testing {

inline Eigen::Quaterniond RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

inline Eigen::Vector3d RandomVector(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline RigidPose RandomPose(std::mt19937_64& rng, double scale = 1.0) {
  return RigidPose(RandomRotation(rng), RandomVector(rng, scale));
}

inline Eigen::Matrix3d RotZ(double degrees) {
  return Eigen::AngleAxisd(degrees * M_PI / 180.0, Eigen::Vector3d::UnitZ())
      .toRotationMatrix();
}

// Camera rotation (world->camera) looking from `center` toward `target`.
inline Eigen::Matrix3d LookAt(const Eigen::Vector3d& center,
                              const Eigen::Vector3d& target,
                              const Eigen::Vector3d& up = Eigen::Vector3d(0, -1, 0)) {
  const Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d x = up.cross(z);
  if (x.norm() < 1e-9) x = Eigen::Vector3d(1, 0, 0).cross(z);
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  return r;
}

inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("locpipe_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace locpipe::testing

#endif  // LOCPIPE_TESTS_TEST_UTIL_H_
