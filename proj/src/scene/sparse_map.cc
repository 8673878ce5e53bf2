#include "locpipe/scene/sparse_map.h"

#include <set>

#include "locpipe/util/error.h"

namespace locpipe {

const char* CameraModelName(CameraModel model) {
  switch (model) {
    case CameraModel::kSimplePinhole: return "SIMPLE_PINHOLE";
    case CameraModel::kPinhole: return "PINHOLE";
    case CameraModel::kSimpleRadial: return "SIMPLE_RADIAL";
    case CameraModel::kRadial: return "RADIAL";
    case CameraModel::kOpenCV: return "OPENCV";
  }
  return "UNKNOWN";
}

SparseMap::SparseMap() : covis_(std::make_shared<CovisibilityCache>()) {}

void SparseMap::InvalidateCache() {
  covis_ = std::make_shared<CovisibilityCache>();
}

void SparseMap::AddCamera(const MapCamera& camera) {
  camera.intrinsics.Validate();
  cameras_[camera.id] = camera;
}

void SparseMap::AddImage(PosedImage image) {
  if (cameras_.count(image.camera_id) == 0) {
    ThrowError(ErrorCode::kInvalidArgument,
               "image " + image.name + " references unknown camera " +
                   std::to_string(image.camera_id));
  }
  const image_t id = image.id;
  images_[id] = std::move(image);
  InvalidateCache();
}

void SparseMap::AddPoint(MapPoint point) {
  for (const TrackElement& el : point.track) {
    auto it = images_.find(el.image_id);
    if (it == images_.end()) {
      ThrowError(ErrorCode::kUnknownImage,
                 "point " + std::to_string(point.id) + " track references image " +
                     std::to_string(el.image_id));
    }
    auto [obs, inserted] =
        it->second.observed_points.emplace(el.keypoint_idx, point.id);
    if (!inserted && obs->second != point.id) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "keypoint " + std::to_string(el.keypoint_idx) + " of image " +
                     std::to_string(el.image_id) + " already observes point " +
                     std::to_string(obs->second));
    }
  }
  const point3D_t id = point.id;
  points_[id] = std::move(point);
  InvalidateCache();
}

void SparseMap::RemovePoint(point3D_t id) {
  auto it = points_.find(id);
  if (it == points_.end()) return;
  for (const TrackElement& el : it->second.track) {
    auto img = images_.find(el.image_id);
    if (img == images_.end()) continue;
    auto obs = img->second.observed_points.find(el.keypoint_idx);
    if (obs != img->second.observed_points.end() && obs->second == id) {
      img->second.observed_points.erase(obs);
    }
  }
  points_.erase(it);
  InvalidateCache();
}

void SparseMap::SetPointUncertainty(point3D_t id,
                                    const Eigen::Matrix3d& covariance,
                                    double sigma) {
  auto it = points_.find(id);
  if (it == points_.end()) {
    ThrowError(ErrorCode::kInvalidArgument, "unknown point " + std::to_string(id));
  }
  it->second.covariance = covariance;
  it->second.uncertainty_sigma = sigma;
}

const MapCamera& SparseMap::Camera(camera_t id) const {
  auto it = cameras_.find(id);
  if (it == cameras_.end()) {
    ThrowError(ErrorCode::kInvalidArgument, "unknown camera " + std::to_string(id));
  }
  return it->second;
}

const PosedImage& SparseMap::Image(image_t id) const {
  auto it = images_.find(id);
  if (it == images_.end()) {
    ThrowError(ErrorCode::kUnknownImage, std::to_string(id));
  }
  return it->second;
}

const MapPoint& SparseMap::Point(point3D_t id) const {
  auto it = points_.find(id);
  if (it == points_.end()) {
    ThrowError(ErrorCode::kInvalidArgument, "unknown point " + std::to_string(id));
  }
  return it->second;
}

const PinholeCamera& SparseMap::CameraOf(image_t id) const {
  return Camera(Image(id).camera_id).intrinsics;
}

std::optional<image_t> SparseMap::FindImageByName(const std::string& name) const {
  for (const auto& [id, image] : images_) {
    if (image.name == name) return id;
  }
  return std::nullopt;
}

const SparseMap::CovisibilityCache& SparseMap::Cache() const {
  CovisibilityCache& cache = *covis_;
  std::call_once(cache.once, [&] {
    for (const auto& [id, point] : points_) {
      std::set<image_t> seen;
      for (const TrackElement& el : point.track) seen.insert(el.image_id);
      for (auto a = seen.begin(); a != seen.end(); ++a) {
        ++cache.self[*a];
        for (auto b = std::next(a); b != seen.end(); ++b) {
          ++cache.pairs[{*a, *b}];
        }
      }
    }
  });
  return cache;
}

std::size_t SparseMap::Covisibility(image_t i, image_t j) const {
  if (!HasImage(i)) ThrowError(ErrorCode::kUnknownImage, std::to_string(i));
  if (!HasImage(j)) ThrowError(ErrorCode::kUnknownImage, std::to_string(j));
  const CovisibilityCache& cache = Cache();
  if (i == j) {
    auto it = cache.self.find(i);
    return it == cache.self.end() ? 0 : it->second;
  }
  auto it = cache.pairs.find({std::min(i, j), std::max(i, j)});
  return it == cache.pairs.end() ? 0 : it->second;
}

const std::map<std::pair<image_t, image_t>, std::size_t>&
SparseMap::CovisibilityGraph() const {
  return Cache().pairs;
}

}  // namespace locpipe
