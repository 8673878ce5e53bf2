#ifndef LOCPIPE_MATCHING_FEATURES_H_
#define LOCPIPE_MATCHING_FEATURES_H_

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "locpipe/scene/sparse_map.h"

namespace locpipe {

using DescriptorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Pixel position plus the pyramid tags of the extraction that produced it.
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 1.0;
  double orientation = 0.0;

  bool operator==(const Keypoint&) const = default;
};

// Keypoints of one image with one unit-norm descriptor row per keypoint.
// Upstream extractors target roughly 1500 keypoints per image; the number is
// a configuration contract and is not enforced here.
struct LocalFeatureSet {
  image_t image_id = 0;
  std::vector<Keypoint> keypoints;
  DescriptorMatrix descriptors;

  std::size_t size() const { return keypoints.size(); }
  int dim() const { return static_cast<int>(descriptors.cols()); }

  // Throws DimensionMismatch if rows != keypoints, NonFiniteDescriptor for
  // NaN/Inf or zero rows.
  void Validate() const;
  void NormalizeDescriptors();

  // Subset in the given order, descriptors kept aligned.
  LocalFeatureSet Select(std::span<const std::size_t> indices) const;
};

// Feature file: "LFS1", u32 N, u32 D, N x (f32 x, y, scale, orientation),
// N x D f32 descriptors, little-endian. Rows are normalized on load.
LocalFeatureSet LoadFeatures(const std::filesystem::path& path,
                             image_t image_id = 0);
void SaveFeatures(const std::filesystem::path& path,
                  const LocalFeatureSet& features);

}  // namespace locpipe

#endif  // LOCPIPE_MATCHING_FEATURES_H_
