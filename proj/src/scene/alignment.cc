#include "locpipe/scene/alignment.h"

#include <Eigen/SVD>

#include "locpipe/util/error.h"

namespace locpipe {
namespace {

Eigen::Vector3d Mean(std::span<const Eigen::Vector3d> points) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

}  // namespace

RigidPose AlignPoints(std::span<const Eigen::Vector3d> src,
                      std::span<const Eigen::Vector3d> dst) {
  if (src.size() != dst.size() || src.empty()) {
    ThrowError(ErrorCode::kInvalidArgument, "alignment needs equal, nonempty point sets");
  }
  const Eigen::Vector3d ms = Mean(src), md = Mean(dst);
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (dst[i] - md) * (src[i] - ms).transpose();

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) d(2, 2) = -1;
  const Eigen::Matrix3d r = svd.matrixU() * d * svd.matrixV().transpose();
  return RigidPose::FromMatrix(r, md - r * ms);
}

double PlanarityRatio(std::span<const Eigen::Vector3d> points) {
  if (points.empty()) return 0.0;
  const Eigen::Vector3d m = Mean(points);
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  for (const auto& p : points) c += (p - m) * (p - m).transpose();
  const Eigen::Vector3d s = Eigen::JacobiSVD<Eigen::Matrix3d>(c).singularValues();
  return s[0] > 0 ? std::sqrt(s[1] / s[0]) : 0.0;
}

}  // namespace locpipe
