#include "locpipe/preprocess/preprocess.h"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "locpipe/util/error.h"
#include "locpipe/util/pgm.h"

namespace locpipe {

ResizePlan PlanResize(int width, int height) {
  if (width < kResizeMultiple || height < kResizeMultiple) {
    ThrowError(ErrorCode::kImageTooSmall,
               std::to_string(width) + "x" + std::to_string(height));
  }
  ResizePlan plan;
  const int long_side = std::max(width, height);
  if (long_side > kResizeLongSide) {
    plan.scale = static_cast<double>(kResizeLongSide) / long_side;
    if (width >= height) {
      plan.scaled_width = kResizeLongSide;
      plan.scaled_height = static_cast<int>(std::lround(height * plan.scale));
    } else {
      plan.scaled_height = kResizeLongSide;
      plan.scaled_width = static_cast<int>(std::lround(width * plan.scale));
    }
  } else {
    plan.scaled_width = width;
    plan.scaled_height = height;
  }
  plan.output_width = plan.scaled_width / kResizeMultiple * kResizeMultiple;
  plan.output_height = plan.scaled_height / kResizeMultiple * kResizeMultiple;
  plan.crop_right = plan.scaled_width - plan.output_width;
  plan.crop_bottom = plan.scaled_height - plan.output_height;
  if (plan.output_width == 0 || plan.output_height == 0) {
    ThrowError(ErrorCode::kImageTooSmall,
               std::to_string(width) + "x" + std::to_string(height) +
                   " collapses below 8 px after scaling");
  }
  return plan;
}

MaskImage LoadMask(const std::filesystem::path& path) {
  const GrayRaster raster = ReadPgm(path);
  if (raster.maxval > 255) {
    ThrowError(ErrorCode::kParseError, path.string() + ": mask must be 8-bit");
  }
  MaskImage mask;
  mask.width = raster.width;
  mask.height = raster.height;
  mask.excluded.resize(raster.pixels.size());
  std::transform(raster.pixels.begin(), raster.pixels.end(), mask.excluded.begin(),
                 [](std::uint16_t v) { return static_cast<std::uint8_t>(v != 0); });
  return mask;
}

MaskImage ResizeMask(const MaskImage& mask, const ResizePlan& plan) {
  MaskImage out;
  out.width = plan.output_width;
  out.height = plan.output_height;
  out.excluded.resize(static_cast<std::size_t>(out.width) * out.height);
  const double sx = static_cast<double>(mask.width) / plan.scaled_width;
  const double sy = static_cast<double>(mask.height) / plan.scaled_height;
  for (int y = 0; y < out.height; ++y) {
    const int src_y = std::min(mask.height - 1, static_cast<int>((y + 0.5) * sy));
    for (int x = 0; x < out.width; ++x) {
      const int src_x = std::min(mask.width - 1, static_cast<int>((x + 0.5) * sx));
      out.excluded[static_cast<std::size_t>(y) * out.width + x] = mask.at(src_x, src_y);
    }
  }
  return out;
}

LocalFeatureSet ApplyMask(const LocalFeatureSet& features, const MaskImage& mask,
                          double bottom_band_fraction) {
  if (!(bottom_band_fraction >= 0.0 && bottom_band_fraction <= 1.0)) {
    ThrowError(ErrorCode::kInvalidArgument, "bottom band fraction must be in [0, 1]");
  }
  features.Validate();
  const double band_start = mask.height * (1.0 - bottom_band_fraction);
  std::vector<std::size_t> keep;
  keep.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Keypoint& kp = features.keypoints[i];
    const int px = static_cast<int>(std::floor(kp.x));
    const int py = static_cast<int>(std::floor(kp.y));
    if (px < 0 || py < 0 || px >= mask.width || py >= mask.height) {
      ThrowError(ErrorCode::kDimensionMismatch,
                 "keypoint " + std::to_string(i) + " lies outside the " +
                     std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                     " mask");
    }
    if (mask.at(px, py)) continue;
    if (bottom_band_fraction > 0.0 && kp.y >= band_start) continue;
    keep.push_back(i);
  }
  return features.Select(keep);
}

std::vector<UndistortedPoint> UndistortKeypoints(const PinholeCamera& camera,
                                                 std::span<const Eigen::Vector2d> pixels) {
  std::vector<UndistortedPoint> out;
  out.reserve(pixels.size());
  if (!camera.distortion.allFinite()) {
    ThrowError(ErrorCode::kInvalidArgument, "non-finite distortion coefficients");
  }
  if (!camera.HasDistortion()) {
    for (const auto& px : pixels) out.push_back({px, true});
    return out;
  }
  for (const auto& px : pixels) {
    const Eigen::Vector2d target = camera.ImageToNormalized(px);
    Eigen::Vector2d xy = target;
    bool converged = false;
    for (int iter = 0; iter < kUndistortMaxIterations; ++iter) {
      const Eigen::Vector2d residual = DistortNormalized(camera.distortion, xy) - target;
      const Eigen::Matrix2d jac = DistortNormalizedJacobian(camera.distortion, xy);
      const double det = jac.determinant();
      if (!std::isfinite(det) || std::abs(det) < 1e-12) break;
      const Eigen::Vector2d step = jac.inverse() * residual;
      xy -= step;
      if (!xy.allFinite()) break;
      if (step.norm() < kUndistortTolerance) {
        converged = true;
        break;
      }
    }
    if (converged) {
      // Newton can land on a spurious root outside the monotonic region.
      const double r = (DistortNormalized(camera.distortion, xy) - target).norm();
      converged = r < kUndistortTolerance;
    }
    out.push_back({camera.NormalizedToImage(xy), converged});
  }
  return out;
}

std::size_t UndistortFeatures(const PinholeCamera& camera, LocalFeatureSet* features) {
  std::vector<Eigen::Vector2d> pixels;
  pixels.reserve(features->size());
  for (const Keypoint& kp : features->keypoints) pixels.emplace_back(kp.x, kp.y);
  const auto result = UndistortKeypoints(camera, pixels);
  std::size_t failed = 0;
  for (std::size_t i = 0; i < result.size(); ++i) {
    if (!result[i].converged) {
      ++failed;
      continue;
    }
    features->keypoints[i].x = result[i].pixel.x();
    features->keypoints[i].y = result[i].pixel.y();
  }
  return failed;
}

}  // namespace locpipe
