#include "locpipe/pose_refine/icp.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locpipe/scene/alignment.h"
#include "locpipe/util/error.h"

namespace locpipe {
namespace {

constexpr double kCollinearRatio = 1e-6;

void CheckCloud(std::span<const Eigen::Vector3d> points, const char* which) {
  if (points.size() < 3 || PlanarityRatio(points) < kCollinearRatio) {
    ThrowError(ErrorCode::kDegenerateCloud,
               std::string(which) + " cloud is too small, collinear or coincident");
  }
}

struct Matches {
  std::vector<Eigen::Vector3d> src, dst;
  double rms = 0.0;
};

// Nearest-neighbour pairs for `moved`, keeping the (1 - trim) closest.
Matches TrimmedMatches(const std::vector<Eigen::Vector3d>& moved, const KdTree& target,
                       double trim) {
  std::vector<std::pair<double, std::size_t>> d(moved.size());
  std::vector<std::size_t> nn(moved.size());
  for (std::size_t i = 0; i < moved.size(); ++i) {
    const auto [j, d2] = target.Nearest(moved[i]);
    d[i] = {d2, i};
    nn[i] = j;
  }
  const auto keep = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::ceil((1.0 - trim) * static_cast<double>(moved.size()))));
  const std::size_t k = std::min(keep, moved.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  Matches m;
  double sum = 0;
  for (std::size_t r = 0; r < k; ++r) {
    m.src.push_back(moved[d[r].second]);
    m.dst.push_back(target.points()[nn[d[r].second]]);
    sum += d[r].first;
  }
  m.rms = std::sqrt(sum / static_cast<double>(k));
  return m;
}

}  // namespace

IcpResult IcpRefine(const PointCloud& source, const KdTree& target, const RigidPose& initial,
                    const IcpOptions& options) {
  if (!(options.trim >= 0 && options.trim < 1)) {
    ThrowError(ErrorCode::kInvalidArgument, "trim fraction must be in [0, 1)");
  }
  CheckCloud(source.points, "source");
  CheckCloud(target.points(), "target");
  PointCloud target_cloud{target.points()};
  const double tol = options.tolerance.value_or(1e-6 * target_cloud.Diameter());

  // Camera->world transform being refined.
  RigidPose to_world = initial.Inverse();
  std::vector<Eigen::Vector3d> moved(source.points.size());
  auto move = [&] {
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = to_world * source.points[i];
  };

  IcpResult result;
  move();
  Matches m = TrimmedMatches(moved, target, options.trim);
  result.rms.push_back(m.rms);
  const double initial_rms = m.rms;
  if (m.rms <= tol) {
    result.pose = initial;
    result.converged = true;
    return result;
  }
  for (int it = 0; it < options.max_iterations; ++it) {
    const RigidPose step = AlignPoints(m.src, m.dst);
    to_world = Compose(step, to_world);
    move();
    ++result.iterations;
    Matches next = TrimmedMatches(moved, target, options.trim);
    // Alignment, reassignment and re-trimming each can only lower the
    // trimmed RMS, so change >= 0 up to rounding.
    const double change = result.rms.back() - next.rms;
    result.rms.push_back(next.rms);
    m = std::move(next);
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  if (!(m.rms <= initial_rms)) ThrowError(ErrorCode::kDiverged, "ICP RMS grew");
  result.pose = to_world.Inverse();
  return result;
}

}  // namespace locpipe
