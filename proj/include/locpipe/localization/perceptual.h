#ifndef LOCPIPE_LOCALIZATION_PERCEPTUAL_H_
#define LOCPIPE_LOCALIZATION_PERCEPTUAL_H_

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "locpipe/localization/pnp.h"
#include "locpipe/scene/camera.h"
#include "locpipe/scene/rigid_pose.h"
#include "locpipe/util/raster.h"

namespace locpipe {

// One encoder layer: C channel maps with a shared validity mask. Feature
// vectors are unit-normalized per pixel across channels.
struct FeatureLayer {
  std::vector<Raster> channels;
  BoolRaster valid;

  int height() const { return static_cast<int>(valid.rows()); }
  int width() const { return static_cast<int>(valid.cols()); }
};

using FeaturePyramid = std::vector<FeatureLayer>;

class PerceptualEncoder {
 public:
  virtual ~PerceptualEncoder() = default;
  // `valid` may be null (all pixels valid).
  virtual FeaturePyramid Encode(const Raster& image, const BoolRaster* valid) const = 0;
};

// Levels at full, 1/2, 1/4 ... resolution (2x2 box averaging), each with
// channels [intensity, d/dx, d/dy] from central differences. A pixel is
// valid only if every input pixel it depends on is valid.
class GradientPyramidEncoder : public PerceptualEncoder {
 public:
  explicit GradientPyramidEncoder(int levels = 3) : levels_(levels) {}
  FeaturePyramid Encode(const Raster& image, const BoolRaster* valid) const override;

 private:
  int levels_;
};

// Sum over layers of the mean (over pixels valid in both) of the squared
// channel-weighted feature difference. Layers with no common valid pixel are
// skipped; +inf if no layer has any. Empty `weights` means all ones.
// Throws ShapeMismatch.
double PerceptualDistance(const FeaturePyramid& a, const FeaturePyramid& b,
                          const std::vector<Eigen::VectorXd>& weights = {});

struct WarpedView {
  Raster image;
  BoolRaster valid;
};

// Forward-warps `image` seen from (camera, pose) with z-depth `depth` (0 =
// invalid) into (target_camera, target_pose): nearest-pixel splat, nearest
// depth wins. Unfilled pixels are invalid. Cameras are used distortion-free.
WarpedView ForwardWarp(const Raster& image, const Raster& depth, const PinholeCamera& camera,
                       const RigidPose& pose, const PinholeCamera& target_camera,
                       const RigidPose& target_pose);

struct ReferenceView {
  const Raster* image = nullptr;
  const Raster* depth = nullptr;  // null when unavailable
  PinholeCamera camera;
  RigidPose pose;
};

using ReferenceLookup = std::function<std::optional<ReferenceView>(image_t)>;

// The database image contributing most inliers (ties: lowest id).
image_t BestReferenceImage(const PoseEstimate& estimate);

// Scores each estimate by the distance between the query image and its best
// reference image warped into the estimated pose, then orders scored
// estimates ascending by distance. Estimates without a reference depth keep
// their relative input order after all scored ones.
std::vector<PoseEstimate> RerankClustersPerceptual(
    const Raster& query_image, const PinholeCamera& query_camera,
    std::vector<PoseEstimate> estimates, const ReferenceLookup& references,
    const PerceptualEncoder& encoder, const std::vector<Eigen::VectorXd>& weights = {});

}  // namespace locpipe

#endif  // LOCPIPE_LOCALIZATION_PERCEPTUAL_H_
