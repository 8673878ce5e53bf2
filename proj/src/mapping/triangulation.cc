#include "locpipe/mapping/triangulation.h"

#include <cmath>

#include <Eigen/SVD>

#include "locpipe/util/error.h"

namespace locpipe {
namespace {

constexpr double kParallelTolerance = 1e-8;

}  // namespace

double TriangulatedPoint::RmsResidual() const {
  if (residuals.empty()) return 0.0;
  double sum = 0.0;
  for (double r : residuals) sum += r * r;
  return std::sqrt(sum / static_cast<double>(residuals.size()));
}

TriangulatedPoint Triangulate(std::span<const TriangulationObservation> observations) {
  if (observations.size() < 2) {
    ThrowError(ErrorCode::kInvalidArgument, "triangulation needs at least 2 observations");
  }

  std::vector<Eigen::Vector3d> rays, centers;
  double extent = 0.0;
  for (const auto& obs : observations) {
    rays.push_back(PixelRayWorld(obs.camera, obs.pose, obs.pixel));
    centers.push_back(obs.pose.Center());
    extent = std::max(extent, centers.back().norm());
  }
  bool any_ray_pair = false, any_baseline = false;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      if (rays[i].cross(rays[j]).norm() > kParallelTolerance) any_ray_pair = true;
      if ((centers[i] - centers[j]).norm() > 1e-12 * std::max(1.0, extent)) any_baseline = true;
    }
  }
  if (!any_ray_pair || !any_baseline) {
    ThrowError(ErrorCode::kDegenerateGeometry,
               !any_baseline ? "zero baseline" : "observation rays are parallel");
  }

  Eigen::MatrixXd a(2 * observations.size(), 4);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& obs = observations[i];
    const Eigen::Matrix<double, 3, 4> p = obs.pose.Matrix();
    const Eigen::Vector2d xy = obs.camera.ImageToNormalized(obs.pixel);
    a.row(2 * i) = xy.x() * p.row(2) - p.row(0);
    a.row(2 * i + 1) = xy.y() * p.row(2) - p.row(1);
    a.row(2 * i).normalize();
    a.row(2 * i + 1).normalize();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d x = svd.matrixV().col(3);
  if (std::abs(x[3]) <= 1e-14 * x.head<3>().norm()) {
    ThrowError(ErrorCode::kDegenerateGeometry, "triangulated point at infinity");
  }

  TriangulatedPoint out;
  out.position = x.head<3>() / x[3];
  PinholeCamera pinhole;
  for (const auto& obs : observations) {
    pinhole = obs.camera;
    pinhole.distortion.setZero();
    const Eigen::Vector2d projected = Project(pinhole, obs.pose, out.position);
    out.residuals.push_back((projected - obs.pixel).norm());
  }
  return out;
}

}  // namespace locpipe
