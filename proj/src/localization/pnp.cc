#include "locpipe/localization/pnp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>

#include "locpipe/localization/p3p.h"
#include "locpipe/util/error.h"

namespace locpipe {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t ContentSeed(std::uint64_t seed, std::span<const Correspondence2D3D> cs) {
  std::uint64_t h = SplitMix(seed);
  for (const auto& c : cs) {
    h = SplitMix(h ^ c.query_keypoint);
    h = SplitMix(h ^ c.point_id);
  }
  return h;
}

Eigen::Vector3d Bearing(const PinholeCamera& camera, const Eigen::Vector2d& pixel) {
  const Eigen::Vector2d xy = camera.ImageToNormalized(pixel);
  return Eigen::Vector3d(xy.x(), xy.y(), 1.0).normalized();
}

double Cost(const PinholeCamera& camera, const RigidPose& pose,
            std::span<const Correspondence2D3D> cs) {
  double sum = 0;
  for (const auto& c : cs) {
    const double e = ReprojectionError(camera, pose, c);
    if (!std::isfinite(e)) return kInf;
    sum += e * e;
  }
  return sum;
}

struct Score {
  std::size_t inliers = 0;
  double error_sum = kInf;

  bool BetterThan(const Score& o) const {
    return inliers != o.inliers ? inliers > o.inliers : error_sum < o.error_sum;
  }
};

Score Evaluate(const PinholeCamera& camera, const RigidPose& pose,
               std::span<const Correspondence2D3D> cs, double threshold) {
  Score s;
  s.error_sum = 0;
  for (const auto& c : cs) {
    const double e = ReprojectionError(camera, pose, c);
    if (e < threshold) {
      ++s.inliers;
      s.error_sum += e;
    }
  }
  return s;
}

std::vector<Correspondence2D3D> Inliers(const PinholeCamera& camera, const RigidPose& pose,
                                        std::span<const Correspondence2D3D> cs,
                                        double threshold) {
  std::vector<Correspondence2D3D> out;
  for (const auto& c : cs) {
    if (ReprojectionError(camera, pose, c) < threshold) out.push_back(c);
  }
  return out;
}

std::size_t RequiredIterations(double inlier_ratio, double confidence) {
  const double p = std::pow(inlier_ratio, 3);
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::numeric_limits<std::size_t>::max();
  const double n = std::log(1.0 - confidence) / std::log(1.0 - p);
  if (!std::isfinite(n) || n > 1e12) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(std::ceil(std::max(n, 0.0)));
}

}  // namespace

double ReprojectionError(const PinholeCamera& camera, const RigidPose& pose,
                         const Correspondence2D3D& c) {
  const Eigen::Vector3d pc = pose * c.point;
  if (!(pc.z() > 0)) return kInf;
  const Eigen::Vector2d proj(camera.fx * pc.x() / pc.z() + camera.cx,
                             camera.fy * pc.y() / pc.z() + camera.cy);
  return (proj - c.pixel).norm();
}

RigidPose RefinePose(const PinholeCamera& camera, const RigidPose& initial,
                     std::span<const Correspondence2D3D> correspondences,
                     int max_iterations) {
  RigidPose pose = initial;
  double cost = Cost(camera, pose, correspondences);
  if (!std::isfinite(cost) || correspondences.size() < 3) return pose;
  double lambda = 1e-4;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& c : correspondences) {
      const Eigen::Vector3d pc = pose * c.point;
      const double iz = 1.0 / pc.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << camera.fx * iz, 0, -camera.fx * pc.x() * iz * iz,
               0, camera.fy * iz, -camera.fy * pc.y() * iz * iz;
      Eigen::Matrix<double, 3, 6> dpc;
      dpc.leftCols<3>() << 0, pc.z(), -pc.y(), -pc.z(), 0, pc.x(), pc.y(), -pc.x(), 0;
      dpc.rightCols<3>().setIdentity();
      const Eigen::Matrix<double, 2, 6> j = dproj * dpc;
      const Eigen::Vector2d r(camera.fx * pc.x() * iz + camera.cx - c.pixel.x(),
                              camera.fy * pc.y() * iz + camera.cy - c.pixel.y());
      h += j.transpose() * j;
      g += j.transpose() * r;
    }
    bool improved = false;
    while (lambda < 1e10) {
      Eigen::Matrix<double, 6, 6> damped = h;
      damped.diagonal() += lambda * (h.diagonal().array() + 1e-12).matrix();
      const Eigen::Matrix<double, 6, 1> step = -damped.ldlt().solve(g);
      if (!step.allFinite()) {
        lambda *= 10;
        continue;
      }
      const Eigen::Vector3d w = step.head<3>();
      const double angle = w.norm();
      const Eigen::Matrix3d dr = angle > 0
          ? Eigen::AngleAxisd(angle, w / angle).toRotationMatrix()
          : Eigen::Matrix3d::Identity();
      const RigidPose candidate = RigidPose::FromMatrix(
          dr * pose.RotationMatrix(), dr * pose.translation() + step.tail<3>());
      const double new_cost = Cost(camera, candidate, correspondences);
      if (new_cost < cost) {
        const double rel = (cost - new_cost) / std::max(cost, 1e-300);
        pose = candidate;
        cost = new_cost;
        lambda = std::max(lambda / 10, 1e-12);
        improved = true;
        if (rel < 1e-14 || step.norm() < 1e-14) return pose;
        break;
      }
      lambda *= 10;
    }
    if (!improved) break;
  }
  return pose;
}

PoseEstimate EstimatePose(std::span<const Correspondence2D3D> correspondences,
                          const PinholeCamera& camera, const PnpOptions& options) {
  const std::size_t n = correspondences.size();
  if (n < 4) {
    ThrowError(ErrorCode::kTooFewCorrespondences,
               std::to_string(n) + " correspondences, need at least 4");
  }
  std::mt19937_64 rng(ContentSeed(options.seed, correspondences));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::vector<Eigen::Vector3d> bearings(n);
  for (std::size_t i = 0; i < n; ++i) bearings[i] = Bearing(camera, correspondences[i].pixel);

  Score best;
  RigidPose best_pose;
  std::size_t required = options.max_iterations;
  for (std::size_t it = 0;
       it < options.max_iterations && it < std::max(options.min_iterations, required); ++it) {
    std::size_t s[3];
    s[0] = pick(rng);
    do s[1] = pick(rng); while (s[1] == s[0]);
    do s[2] = pick(rng); while (s[2] == s[0] || s[2] == s[1]);
    const std::array<Eigen::Vector3d, 3> b = {bearings[s[0]], bearings[s[1]], bearings[s[2]]};
    const std::array<Eigen::Vector3d, 3> p = {correspondences[s[0]].point,
                                              correspondences[s[1]].point,
                                              correspondences[s[2]].point};
    for (const RigidPose& pose : SolveP3P(b, p)) {
      const Score score = Evaluate(camera, pose, correspondences, options.threshold);
      if (score.BetterThan(best)) {
        best = score;
        best_pose = pose;
        required = RequiredIterations(static_cast<double>(best.inliers) / n, options.confidence);
      }
    }
  }
  if (best.inliers < 3) ThrowError(ErrorCode::kNoPose, "no consistent pose hypothesis");

  PoseEstimate out;
  out.pose = best_pose;
  out.inliers = Inliers(camera, best_pose, correspondences, options.threshold);
  if (options.refine) {
    // Refine and recount until the inlier set stops growing.
    for (int round = 0; round < 5; ++round) {
      const RigidPose refined = RefinePose(camera, out.pose, out.inliers);
      auto inliers = Inliers(camera, refined, correspondences, options.threshold);
      if (inliers.size() < out.inliers.size()) break;
      const bool same = inliers.size() == out.inliers.size();
      out.pose = refined;
      out.inliers = std::move(inliers);
      if (same) break;
    }
  }
  out.num_correspondences = n;
  double sum = 0;
  for (const auto& c : out.inliers) sum += ReprojectionError(camera, out.pose, c);
  out.mean_error = out.inliers.empty() ? 0.0 : sum / static_cast<double>(out.inliers.size());
  if (out.inliers.size() < options.min_inliers) {
    ThrowError(ErrorCode::kNoPose, std::to_string(out.inliers.size()) + " inliers, need " +
                                       std::to_string(options.min_inliers));
  }
  return out;
}

}  // namespace locpipe
