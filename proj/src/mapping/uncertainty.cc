#include "locpipe/mapping/uncertainty.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <Eigen/Eigenvalues>

#include "locpipe/util/error.h"

namespace locpipe {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Eigen::Matrix<double, 2, 3> ObservationJacobian(const PinholeCamera& camera,
                                                const RigidPose& pose,
                                                const Eigen::Vector3d& point_world) {
  const Eigen::Vector3d pc = pose * point_world;
  if (!(pc.z() > 0)) {
    ThrowError(ErrorCode::kCheiralityViolation, "point behind camera in Jacobian");
  }
  const double iz = 1.0 / pc.z();
  Eigen::Matrix<double, 2, 3> d;
  d << camera.fx * iz, 0, -pc.x() * camera.fx * iz * iz,
       0, camera.fy * iz, -pc.y() * camera.fy * iz * iz;
  return d * pose.RotationMatrix();
}

Eigen::Matrix3d PointUncertainty::Covariance() const {
  if (rank_deficient) return Eigen::Matrix3d::Constant(kInf);
  return information.inverse();
}

PointUncertainty PointInformation(const Eigen::Vector3d& point_world,
                                  std::span<const ObservingView> views) {
  PointUncertainty out;
  std::size_t valid = 0;
  for (const ObservingView& view : views) {
    if (!((view.pose * point_world).z() > 0)) continue;
    const auto j = ObservationJacobian(view.camera, view.pose, point_world);
    out.information += view.weight * j.transpose() * j;
    ++valid;
  }
  if (valid == 0) ThrowError(ErrorCode::kNoValidObservation, "no view sees the point");
  out.information = 0.5 * (out.information + out.information.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(out.information,
                                                           Eigen::EigenvaluesOnly);
  const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
  const double floor = kInformationRankFloor * lambda[2];
  out.rank_deficient = !(lambda[2] > 0) || lambda[0] < floor;
  for (int i = 0; i < 3; ++i) {
    out.sigma_axes[i] = (lambda[i] > 0 && lambda[i] >= floor) ? 1.0 / std::sqrt(lambda[i]) : kInf;
  }
  out.sigma_max = out.rank_deficient ? kInf : out.sigma_axes[0];
  return out;
}

PointUncertainty PointInformation(const SparseMap& map, point3D_t point_id,
                                  const ObservationWeight& weight) {
  const MapPoint& point = map.Point(point_id);
  std::vector<ObservingView> views;
  views.reserve(point.track.size());
  for (const TrackElement& el : point.track) {
    const PosedImage& image = map.Image(el.image_id);
    views.push_back({map.CameraOf(el.image_id), image.pose,
                     weight ? weight(el.image_id, el.keypoint_idx) : 1.0});
  }
  return PointInformation(point.position, views);
}

const char* PointDecisionName(PointDecision decision) {
  switch (decision) {
    case PointDecision::kKeep:
      return "keep";
    case PointDecision::kRejectSigma:
      return "reject_sigma";
    case PointDecision::kRejectRank:
      return "reject_rank";
    case PointDecision::kRejectTrack:
      return "reject_track";
    case PointDecision::kRejectNoView:
      return "reject_noview";
  }
  return "?";
}

RefineReport RefineMap(SparseMap& map, const RefineOptions& options) {
  if (options.sigma_threshold && !(*options.sigma_threshold >= 0)) {
    ThrowError(ErrorCode::kInvalidArgument, "sigma threshold must be >= 0");
  }
  if (!options.sigma_threshold && !(options.sigma_multiplier > 0)) {
    ThrowError(ErrorCode::kInvalidArgument, "sigma multiplier must be > 0");
  }

  struct Entry {
    point3D_t id;
    std::optional<PointUncertainty> u;
    bool short_track;
  };
  std::vector<Entry> entries;
  entries.reserve(map.Points().size());
  std::vector<double> finite;
  for (const auto& [id, point] : map.Points()) {
    Entry e{id, std::nullopt, point.track.size() < options.min_track};
    try {
      e.u = PointInformation(map, id, options.weight);
      if (!e.u->rank_deficient) finite.push_back(e.u->sigma_max);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNoValidObservation) throw;
    }
    entries.push_back(std::move(e));
  }

  RefineReport report;
  if (options.sigma_threshold) {
    report.threshold = *options.sigma_threshold;
  } else if (finite.empty()) {
    report.threshold = kInf;
  } else {
    const auto mid = finite.begin() + static_cast<std::ptrdiff_t>(finite.size() / 2);
    std::nth_element(finite.begin(), mid, finite.end());
    double median = *mid;
    if (finite.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(finite.begin(), mid));
    }
    report.threshold = options.sigma_multiplier * median;
  }

  for (const Entry& e : entries) {
    PointReport r{e.id, e.u ? e.u->sigma_max : kInf, PointDecision::kKeep};
    if (e.short_track) {
      r.decision = PointDecision::kRejectTrack;
    } else if (!e.u) {
      r.decision = PointDecision::kRejectNoView;
    } else if (e.u->rank_deficient) {
      r.decision = PointDecision::kRejectRank;
    } else if (e.u->sigma_max > report.threshold) {
      r.decision = PointDecision::kRejectSigma;
    }
    if (r.decision == PointDecision::kKeep) {
      map.SetPointUncertainty(e.id, e.u->Covariance(), e.u->sigma_max);
      ++report.kept;
    } else {
      map.RemovePoint(e.id);
      ++report.rejected;
    }
    report.points.push_back(r);
  }
  return report;
}

void WriteRefineReport(const std::filesystem::path& path, const RefineReport& report) {
  std::ofstream out(path);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  out << std::setprecision(17);
  for (const PointReport& p : report.points) {
    out << p.point_id << ' ' << p.sigma_max << ' ' << PointDecisionName(p.decision) << '\n';
  }
  out << "# kept " << report.kept << '\n'
      << "# rejected " << report.rejected << '\n'
      << "# threshold " << report.threshold << '\n';
}

}  // namespace locpipe
