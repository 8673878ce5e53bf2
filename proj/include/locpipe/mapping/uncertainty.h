#ifndef LOCPIPE_MAPPING_UNCERTAINTY_H_
#define LOCPIPE_MAPPING_UNCERTAINTY_H_

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "locpipe/scene/camera.h"
#include "locpipe/scene/rigid_pose.h"
#include "locpipe/scene/sparse_map.h"

namespace locpipe {

// Eigenvalues below this fraction of the largest count as rank deficiency.
inline constexpr double kInformationRankFloor = 1e-10;
inline constexpr double kDefaultSigmaMultiplier = 3.0;
inline constexpr std::size_t kDefaultMinTrack = 2;

// d(pixel)/d(p_w) for the distortion-free projection. Throws
// CheiralityViolation when the point is not in front of the camera.
Eigen::Matrix<double, 2, 3> ObservationJacobian(const PinholeCamera& camera,
                                                const RigidPose& pose,
                                                const Eigen::Vector3d& point_world);

struct PointUncertainty {
  Eigen::Matrix3d information = Eigen::Matrix3d::Zero();
  Eigen::Vector3d sigma_axes = Eigen::Vector3d::Zero();  // descending
  double sigma_max = 0.0;
  bool rank_deficient = false;  // sigma_max is +inf

  Eigen::Matrix3d Covariance() const;
};

struct ObservingView {
  PinholeCamera camera;
  RigidPose pose;
  double weight = 1.0;  // scalar pixel information
};

// Sums J^T W J over the views that see the point in front of them. Throws
// NoValidObservation if none do.
PointUncertainty PointInformation(const Eigen::Vector3d& point_world,
                                  std::span<const ObservingView> views);

// Per-observation weight hook; the default is 1 for every observation.
using ObservationWeight = std::function<double(image_t, std::uint32_t keypoint_idx)>;

PointUncertainty PointInformation(const SparseMap& map, point3D_t point_id,
                                  const ObservationWeight& weight = {});

struct RefineOptions {
  // Absolute threshold; if unset, sigma_multiplier x median finite sigma_max.
  std::optional<double> sigma_threshold;
  double sigma_multiplier = kDefaultSigmaMultiplier;
  std::size_t min_track = kDefaultMinTrack;
  ObservationWeight weight;
};

enum class PointDecision { kKeep, kRejectSigma, kRejectRank, kRejectTrack, kRejectNoView };

const char* PointDecisionName(PointDecision decision);

struct PointReport {
  point3D_t point_id = 0;
  double sigma_max = 0.0;
  PointDecision decision = PointDecision::kKeep;
};

struct RefineReport {
  double threshold = 0.0;
  std::vector<PointReport> points;  // by ascending point id
  std::size_t kept = 0;
  std::size_t rejected = 0;
};

// Removes points whose largest uncertainty axis exceeds the threshold, whose
// information is rank deficient, or whose track is shorter than min_track.
// Survivors get their covariance and sigma_max stored on the point.
RefineReport RefineMap(SparseMap& map, const RefineOptions& options = {});

// Lines "point_id sigma_max decision" then "# kept N" / "# rejected N" /
// "# threshold T".
void WriteRefineReport(const std::filesystem::path& path, const RefineReport& report);

}  // namespace locpipe

#endif  // LOCPIPE_MAPPING_UNCERTAINTY_H_
