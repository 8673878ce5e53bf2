#ifndef LOCPIPE_SCENE_SPARSE_MAP_H_
#define LOCPIPE_SCENE_SPARSE_MAP_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "locpipe/scene/camera.h"
#include "locpipe/scene/rigid_pose.h"

namespace locpipe {

using camera_t = std::uint32_t;
using image_t = std::uint32_t;
using point3D_t = std::uint64_t;

enum class CameraModel { kSimplePinhole, kPinhole, kSimpleRadial, kRadial, kOpenCV };

const char* CameraModelName(CameraModel model);

struct MapCamera {
  camera_t id = 0;
  CameraModel model = CameraModel::kPinhole;
  PinholeCamera intrinsics;
};

struct TrackElement {
  image_t image_id = 0;
  std::uint32_t keypoint_idx = 0;

  bool operator==(const TrackElement&) const = default;
};

struct MapPoint {
  point3D_t id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::vector<TrackElement> track;
  std::optional<Eigen::Matrix3d> covariance;
  std::optional<double> uncertainty_sigma;
  Eigen::Matrix<std::uint8_t, 3, 1> color = Eigen::Matrix<std::uint8_t, 3, 1>::Zero();
  double error = 0.0;
};

// A registered database image.
struct PosedImage {
  image_t id = 0;
  std::string name;
  camera_t camera_id = 0;
  RigidPose pose;
  std::optional<std::int64_t> timestamp;
  std::vector<Eigen::Vector2d> keypoints;
  // keypoint index -> observed map point.
  std::map<std::uint32_t, point3D_t> observed_points;
};

// Cameras, posed images and triangulated points. Built single-writer, then
// treated as immutable; the co-visibility graph is computed on first use and
// cached (thread-safe on concurrent first access).
class SparseMap {
 public:
  SparseMap();

  void AddCamera(const MapCamera& camera);
  void AddImage(PosedImage image);
  // Links every track element into the observing image. Throws UnknownImage
  // for dangling references and InvalidArgument if a keypoint already
  // observes a different point.
  void AddPoint(MapPoint point);
  void RemovePoint(point3D_t id);
  void SetPointUncertainty(point3D_t id, const Eigen::Matrix3d& covariance,
                           double sigma);

  bool HasImage(image_t id) const { return images_.count(id) > 0; }
  bool HasPoint(point3D_t id) const { return points_.count(id) > 0; }

  const MapCamera& Camera(camera_t id) const;
  const PosedImage& Image(image_t id) const;
  const MapPoint& Point(point3D_t id) const;
  const PinholeCamera& CameraOf(image_t id) const;

  const std::map<camera_t, MapCamera>& Cameras() const { return cameras_; }
  const std::map<image_t, PosedImage>& Images() const { return images_; }
  const std::map<point3D_t, MapPoint>& Points() const { return points_; }

  std::optional<image_t> FindImageByName(const std::string& name) const;

  // Number of distinct points observed by both images (i == j gives the
  // number of points image i observes). Throws UnknownImage.
  std::size_t Covisibility(image_t i, image_t j) const;

  // Nonzero co-visibility counts keyed by (i, j) with i < j.
  const std::map<std::pair<image_t, image_t>, std::size_t>& CovisibilityGraph()
      const;

 private:
  struct CovisibilityCache {
    std::once_flag once;
    std::map<std::pair<image_t, image_t>, std::size_t> pairs;
    std::map<image_t, std::size_t> self;
  };

  const CovisibilityCache& Cache() const;
  void InvalidateCache();

  std::map<camera_t, MapCamera> cameras_;
  std::map<image_t, PosedImage> images_;
  std::map<point3D_t, MapPoint> points_;
  std::shared_ptr<CovisibilityCache> covis_;
};

}  // namespace locpipe

#endif  // LOCPIPE_SCENE_SPARSE_MAP_H_
