#include "locpipe/localization/p3p.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "locpipe/scene/alignment.h"

namespace locpipe {
namespace {

double EvalQuartic(const Eigen::Matrix<double, 5, 1>& c, double x) {
  return (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4];
}

double EvalQuarticDerivative(const Eigen::Matrix<double, 5, 1>& c, double x) {
  return ((4 * c[0] * x + 3 * c[1]) * x + 2 * c[2]) * x + c[3];
}

}  // namespace

std::vector<double> SolveQuartic(const Eigen::Matrix<double, 5, 1>& c) {
  std::vector<double> roots;
  const double scale = c.cwiseAbs().maxCoeff();
  if (!(scale > 0) || std::abs(c[0]) < 1e-14 * scale) return roots;

  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion.block<3, 3>(1, 0).setIdentity();
  for (int i = 0; i < 4; ++i) companion(i, 3) = -c[4 - i] / c[0];
  const Eigen::Vector4cd eig = Eigen::EigenSolver<Eigen::Matrix4d>(companion, false).eigenvalues();
  for (int i = 0; i < 4; ++i) {
    // Nearly-real roots are kept: a double root under noise splits into a
    // conjugate pair that is still a useful hypothesis.
    if (std::abs(eig[i].imag()) > 1e-6 * (1.0 + std::abs(eig[i].real()))) continue;
    double x = eig[i].real();
    for (int it = 0; it < 3; ++it) {
      const double d = EvalQuarticDerivative(c, x);
      if (d == 0) break;
      const double step = EvalQuartic(c, x) / d;
      if (!std::isfinite(step)) break;
      x -= step;
    }
    roots.push_back(x);
  }
  return roots;
}

std::vector<RigidPose> SolveP3P(const std::array<Eigen::Vector3d, 3>& bearings,
                                const std::array<Eigen::Vector3d, 3>& points) {
  std::vector<RigidPose> poses;
  const Eigen::Vector3d j1 = bearings[0].normalized(), j2 = bearings[1].normalized(),
                        j3 = bearings[2].normalized();
  const double a2 = (points[1] - points[2]).squaredNorm();
  const double b2 = (points[0] - points[2]).squaredNorm();
  const double c2 = (points[0] - points[1]).squaredNorm();
  if (!(a2 > 0 && b2 > 0 && c2 > 0)) return poses;
  if ((points[1] - points[0]).cross(points[2] - points[0]).norm() <
      1e-10 * std::sqrt(b2 * c2)) {
    return poses;  // collinear
  }
  const double ca = j2.dot(j3), cb = j1.dot(j3), cg = j1.dot(j2);
  const double amc = (a2 - c2) / b2, apc = (a2 + c2) / b2;
  const double bmc = (b2 - c2) / b2, bma = (b2 - a2) / b2;

  Eigen::Matrix<double, 5, 1> coeffs;
  coeffs[0] = (amc - 1) * (amc - 1) - 4 * c2 / b2 * ca * ca;
  coeffs[1] = 4 * (amc * (1 - amc) * cb - (1 - apc) * ca * cg + 2 * c2 / b2 * ca * ca * cb);
  coeffs[2] = 2 * (amc * amc - 1 + 2 * amc * amc * cb * cb + 2 * bmc * ca * ca -
                   4 * apc * ca * cb * cg + 2 * bma * cg * cg);
  coeffs[3] = 4 * (-amc * (1 + amc) * cb + 2 * a2 / b2 * cg * cg * cb - (1 - apc) * ca * cg);
  coeffs[4] = (1 + amc) * (1 + amc) - 4 * a2 / b2 * cg * cg;

  for (double v : SolveQuartic(coeffs)) {
    if (!(v > 0)) continue;
    const double denom = 2 * (cg - v * ca);
    if (std::abs(denom) < 1e-14) continue;
    const double u = ((-1 + amc) * v * v - 2 * amc * cb * v + 1 + amc) / denom;
    if (!(u > 0)) continue;
    const double s1_sq = b2 / (1 + v * v - 2 * v * cb);
    if (!(s1_sq > 0)) continue;
    const double s1 = std::sqrt(s1_sq);
    const std::array<Eigen::Vector3d, 3> camera_points = {s1 * j1, u * s1 * j2, v * s1 * j3};
    const RigidPose pose = AlignPoints(points, camera_points);
    if (!pose.translation().allFinite()) continue;
    poses.push_back(pose);
  }
  return poses;
}

}  // namespace locpipe
