#ifndef LOCPIPE_POSE_REFINE_POINT_CLOUD_H_
#define LOCPIPE_POSE_REFINE_POINT_CLOUD_H_

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "locpipe/scene/camera.h"
#include "locpipe/scene/sparse_map.h"
#include "locpipe/util/raster.h"

namespace locpipe {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  // Bounding-box diagonal.
  double Diameter() const;
};

// Camera-frame points for every `stride`-th valid pixel (depth > 0 and
// finite). Depth is along the optical axis. Throws AllInvalid,
// InvalidArgument (negative depth, stride < 1, size mismatch with camera).
PointCloud BackprojectDepth(const PinholeCamera& camera, const Raster& depth, int stride = 1);

PointCloud MapPointCloud(const SparseMap& map);

// Depth rasters: "DPT1" + u32 width + u32 height + w*h f32, or a PGM whose
// samples are multiplied by `pgm_scale` (meters per unit).
Raster LoadDepth(const std::filesystem::path& path, double pgm_scale);
void SaveDepthDpt(const std::filesystem::path& path, const Raster& depth);

// Exact nearest-neighbour queries over a fixed 3D point set.
class KdTree {
 public:
  explicit KdTree(std::vector<Eigen::Vector3d> points);

  // (index, squared distance). Throws InvalidArgument on an empty tree.
  std::pair<std::size_t, double> Nearest(const Eigen::Vector3d& query) const;

  std::size_t size() const { return points_.size(); }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }

 private:
  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    std::size_t begin = 0, end = 0;  // leaf range into order_
    std::size_t left = 0, right = 0;
  };

  std::size_t Build(std::size_t begin, std::size_t end);
  void Search(std::size_t node, const Eigen::Vector3d& q, std::size_t& best,
              double& best_d2) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace locpipe

#endif  // LOCPIPE_POSE_REFINE_POINT_CLOUD_H_
