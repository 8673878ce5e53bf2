#ifndef LOCPIPE_PREPROCESS_PREPROCESS_H_
#define LOCPIPE_PREPROCESS_PREPROCESS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "locpipe/matching/features.h"
#include "locpipe/scene/camera.h"

namespace locpipe {

inline constexpr int kResizeLongSide = 1600;
inline constexpr int kResizeMultiple = 8;

// Isotropic downscale so the long side becomes 1600 px (never upscaled),
// followed by a bottom-right crop to multiples of 8.
struct ResizePlan {
  double scale = 1.0;
  int scaled_width = 0;
  int scaled_height = 0;
  int output_width = 0;
  int output_height = 0;
  int crop_right = 0;
  int crop_bottom = 0;
};

// Throws ImageTooSmall when a side is below 8 px (before or after scaling).
ResizePlan PlanResize(int width, int height);

// Per-pixel exclusion mask; true marks pixels whose keypoints are dropped.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> excluded;  // row-major, 0/1

  bool at(int x, int y) const {
    return excluded[static_cast<std::size_t>(y) * width + x] != 0;
  }
};

// 8-bit grayscale PGM, nonzero = excluded.
MaskImage LoadMask(const std::filesystem::path& path);
// Nearest-neighbor resample of a mask through the same plan as its image.
MaskImage ResizeMask(const MaskImage& mask, const ResizePlan& plan);

// Drops keypoints on excluded pixels or inside the bottom band
// (y >= height * (1 - bottom_band_fraction)); descriptor rows stay aligned
// and order is preserved. Throws DimensionMismatch if a keypoint falls
// outside the mask, InvalidArgument for a band outside [0, 1].
LocalFeatureSet ApplyMask(const LocalFeatureSet& features, const MaskImage& mask,
                          double bottom_band_fraction = 0.0);

struct UndistortedPoint {
  Eigen::Vector2d pixel;
  bool converged = false;
};

inline constexpr int kUndistortMaxIterations = 20;
inline constexpr double kUndistortTolerance = 1e-8;  // normalized units

// Inverts the camera's distortion for each pixel by Newton iteration in
// normalized coordinates. Non-converging points are flagged, not thrown.
std::vector<UndistortedPoint> UndistortKeypoints(const PinholeCamera& camera,
                                                 std::span<const Eigen::Vector2d> pixels);

// Undistorts all keypoints of a feature set in place; returns the number of
// points that failed to converge (left at their distorted position).
std::size_t UndistortFeatures(const PinholeCamera& camera, LocalFeatureSet* features);

}  // namespace locpipe

#endif  // LOCPIPE_PREPROCESS_PREPROCESS_H_
