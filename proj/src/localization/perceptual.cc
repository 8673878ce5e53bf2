#include "locpipe/localization/perceptual.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "locpipe/util/error.h"

namespace locpipe {
namespace {

FeatureLayer EncodeLevel(const Raster& img, const BoolRaster& valid) {
  const Eigen::Index h = img.rows(), w = img.cols();
  FeatureLayer layer;
  layer.channels.assign(3, Raster::Zero(h, w));
  layer.valid = BoolRaster::Constant(h, w, false);
  for (Eigen::Index y = 1; y + 1 < h; ++y) {
    for (Eigen::Index x = 1; x + 1 < w; ++x) {
      if (!(valid(y, x) && valid(y, x - 1) && valid(y, x + 1) && valid(y - 1, x) &&
            valid(y + 1, x))) {
        continue;
      }
      const Eigen::Vector3d f(img(y, x), 0.5 * (img(y, x + 1) - img(y, x - 1)),
                              0.5 * (img(y + 1, x) - img(y - 1, x)));
      const double n = f.norm();
      for (int c = 0; c < 3; ++c) layer.channels[c](y, x) = n > 0 ? f[c] / n : 0.0;
      layer.valid(y, x) = true;
    }
  }
  return layer;
}

}  // namespace

FeaturePyramid GradientPyramidEncoder::Encode(const Raster& image, const BoolRaster* valid) const {
  Raster img = image;
  BoolRaster mask = valid ? *valid : BoolRaster::Constant(image.rows(), image.cols(), true);
  if (mask.rows() != img.rows() || mask.cols() != img.cols()) {
    ThrowError(ErrorCode::kShapeMismatch, "mask does not match image");
  }
  FeaturePyramid out;
  for (int level = 0; level < levels_; ++level) {
    out.push_back(EncodeLevel(img, mask));
    const Eigen::Index h = img.rows() / 2, w = img.cols() / 2;
    if (h < 1 || w < 1) break;
    Raster next(h, w);
    BoolRaster next_mask(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) {
        next(y, x) = 0.25 * (img(2 * y, 2 * x) + img(2 * y, 2 * x + 1) + img(2 * y + 1, 2 * x) +
                             img(2 * y + 1, 2 * x + 1));
        next_mask(y, x) = mask(2 * y, 2 * x) && mask(2 * y, 2 * x + 1) &&
                          mask(2 * y + 1, 2 * x) && mask(2 * y + 1, 2 * x + 1);
      }
    }
    img = std::move(next);
    mask = std::move(next_mask);
  }
  return out;
}

double PerceptualDistance(const FeaturePyramid& a, const FeaturePyramid& b,
                          const std::vector<Eigen::VectorXd>& weights) {
  if (a.size() != b.size()) ThrowError(ErrorCode::kShapeMismatch, "pyramid depth differs");
  if (!weights.empty() && weights.size() != a.size()) {
    ThrowError(ErrorCode::kShapeMismatch, "one weight vector per layer expected");
  }
  double total = 0.0;
  bool any = false;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const FeatureLayer& la = a[l];
    const FeatureLayer& lb = b[l];
    if (la.height() != lb.height() || la.width() != lb.width() ||
        la.channels.size() != lb.channels.size()) {
      ThrowError(ErrorCode::kShapeMismatch, "layer " + std::to_string(l) + " shapes differ");
    }
    if (!weights.empty() && static_cast<std::size_t>(weights[l].size()) != la.channels.size()) {
      ThrowError(ErrorCode::kShapeMismatch, "weight size differs from channel count");
    }
    const BoolRaster both = la.valid && lb.valid;
    const auto count = both.count();
    if (count == 0) continue;
    double sum = 0.0;
    for (std::size_t c = 0; c < la.channels.size(); ++c) {
      const double w = weights.empty() ? 1.0 : weights[l][static_cast<Eigen::Index>(c)];
      sum += w * w * both.select((la.channels[c] - lb.channels[c]).square(), 0.0).sum();
    }
    total += sum / static_cast<double>(count);
    any = true;
  }
  return any ? total : std::numeric_limits<double>::infinity();
}

WarpedView ForwardWarp(const Raster& image, const Raster& depth, const PinholeCamera& camera,
                       const RigidPose& pose, const PinholeCamera& target_camera,
                       const RigidPose& target_pose) {
  if (image.rows() != depth.rows() || image.cols() != depth.cols()) {
    ThrowError(ErrorCode::kShapeMismatch, "depth does not match image");
  }
  const int tw = target_camera.width, th = target_camera.height;
  WarpedView out{Raster::Zero(th, tw), BoolRaster::Constant(th, tw, false)};
  Raster zbuf = Raster::Constant(th, tw, std::numeric_limits<double>::infinity());
  const RigidPose relative = Compose(target_pose, pose.Inverse());
  for (Eigen::Index y = 0; y < image.rows(); ++y) {
    for (Eigen::Index x = 0; x < image.cols(); ++x) {
      const double d = depth(y, x);
      if (!(d > 0) || !std::isfinite(d)) continue;
      const Eigen::Vector3d pc((x - camera.cx) / camera.fx * d, (y - camera.cy) / camera.fy * d, d);
      const Eigen::Vector3d pt = relative * pc;
      if (!(pt.z() > 0)) continue;
      const long u = std::lround(target_camera.fx * pt.x() / pt.z() + target_camera.cx);
      const long v = std::lround(target_camera.fy * pt.y() / pt.z() + target_camera.cy);
      if (u < 0 || v < 0 || u >= tw || v >= th) continue;
      if (pt.z() < zbuf(v, u)) {
        zbuf(v, u) = pt.z();
        out.image(v, u) = image(y, x);
        out.valid(v, u) = true;
      }
    }
  }
  return out;
}

image_t BestReferenceImage(const PoseEstimate& estimate) {
  std::map<image_t, std::size_t> votes;
  for (const auto& c : estimate.inliers) ++votes[c.db_image];
  image_t best = 0;
  std::size_t best_votes = 0;
  for (const auto& [id, n] : votes) {
    if (n > best_votes) {
      best = id;
      best_votes = n;
    }
  }
  return best;
}

std::vector<PoseEstimate> RerankClustersPerceptual(
    const Raster& query_image, const PinholeCamera& query_camera,
    std::vector<PoseEstimate> estimates, const ReferenceLookup& references,
    const PerceptualEncoder& encoder, const std::vector<Eigen::VectorXd>& weights) {
  if (estimates.empty()) return estimates;
  const FeaturePyramid query = encoder.Encode(query_image, nullptr);
  for (PoseEstimate& e : estimates) {
    e.perceptual_distance.reset();
    if (e.inliers.empty() || !references) continue;
    const auto ref = references(BestReferenceImage(e));
    if (!ref || !ref->image || !ref->depth) continue;
    const WarpedView warped =
        ForwardWarp(*ref->image, *ref->depth, ref->camera, ref->pose, query_camera, e.pose);
    e.perceptual_distance =
        PerceptualDistance(query, encoder.Encode(warped.image, &warped.valid), weights);
  }
  std::stable_sort(estimates.begin(), estimates.end(),
                   [](const PoseEstimate& a, const PoseEstimate& b) {
                     if (a.perceptual_distance.has_value() != b.perceptual_distance.has_value()) {
                       return a.perceptual_distance.has_value();
                     }
                     return a.perceptual_distance && *a.perceptual_distance < *b.perceptual_distance;
                   });
  return estimates;
}

}  // namespace locpipe
