#include <random>

#include <gtest/gtest.h>

#include "locpipe/preprocess/preprocess.h"
#include "locpipe/util/error.h"
#include "locpipe/util/pgm.h"
#include "test_util.h"

namespace locpipe {
namespace {

TEST(PlanResize, LandscapePhoto) {
  const ResizePlan plan = PlanResize(4032, 3024);
  EXPECT_DOUBLE_EQ(plan.scale, 1600.0 / 4032.0);
  EXPECT_EQ(plan.output_width, 1600);
  EXPECT_EQ(plan.output_height, 1200);
  EXPECT_EQ(plan.crop_right, 0);
  EXPECT_EQ(plan.crop_bottom, 0);
}

TEST(PlanResize, FullHdCropsBottom) {
  const ResizePlan plan = PlanResize(1920, 1080);
  EXPECT_EQ(plan.scaled_width, 1600);
  EXPECT_EQ(plan.scaled_height, 900);
  EXPECT_EQ(plan.output_width, 1600);
  EXPECT_EQ(plan.output_height, 896);
  EXPECT_EQ(plan.crop_bottom, 4);
}

TEST(PlanResize, FixedPointAndNoUpscale) {
  const ResizePlan square = PlanResize(1600, 1600);
  EXPECT_EQ(square.scale, 1.0);
  EXPECT_EQ(square.output_width, 1600);
  EXPECT_EQ(square.output_height, 1600);
  const ResizePlan small = PlanResize(645, 483);
  EXPECT_EQ(small.scale, 1.0);
  EXPECT_EQ(small.output_width, 640);
  EXPECT_EQ(small.output_height, 480);
  EXPECT_EQ(small.crop_right, 5);
  EXPECT_EQ(small.crop_bottom, 3);
}

TEST(PlanResize, TooSmall) {
  EXPECT_THROW(PlanResize(7, 100), Error);
  EXPECT_THROW(PlanResize(100000, 8), Error);
}

TEST(PlanResize, PropertiesOverRandomSizes) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> side(8, 9000);
  for (int i = 0; i < 5000; ++i) {
    const int w = side(rng), h = side(rng);
    ResizePlan plan;
    try {
      plan = PlanResize(w, h);
    } catch (const Error&) {
      continue;  // extreme aspect ratios collapse below 8 px
    }
    EXPECT_EQ(plan.output_width % 8, 0);
    EXPECT_EQ(plan.output_height % 8, 0);
    EXPECT_LT(plan.crop_right, 8);
    EXPECT_LT(plan.crop_bottom, 8);
    EXPECT_LT(std::abs(plan.scaled_width - w * plan.scale), 1.0);
    EXPECT_LT(std::abs(plan.scaled_height - h * plan.scale), 1.0);
    if (std::max(w, h) >= 1600) {
      EXPECT_EQ(std::max(plan.scaled_width, plan.scaled_height), 1600);
    } else {
      EXPECT_EQ(plan.scale, 1.0);
    }
  }
}

// Keypoint i sits at (x_i, y_i) with a descriptor tagging its row index.
LocalFeatureSet TaggedFeatures(const std::vector<Eigen::Vector2d>& pts) {
  LocalFeatureSet f;
  f.descriptors = DescriptorMatrix::Zero(static_cast<Eigen::Index>(pts.size()),
                                         static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    f.keypoints.push_back({pts[i].x(), pts[i].y()});
    f.descriptors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return f;
}

MaskImage FilledMask(int w, int h, bool value) {
  return {w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, value)};
}

TEST(ApplyMask, EmptyMaskIsNoOp) {
  const auto f = TaggedFeatures({{1, 1}, {50, 20}, {99.5, 79.5}});
  const auto out = ApplyMask(f, FilledMask(100, 80, false), 0.0);
  EXPECT_EQ(out.keypoints, f.keypoints);
  EXPECT_EQ(out.descriptors, f.descriptors);
}

TEST(ApplyMask, FullMaskRemovesEverything) {
  const auto f = TaggedFeatures({{1, 1}, {50, 20}});
  EXPECT_EQ(ApplyMask(f, FilledMask(100, 80, true)).size(), 0u);
}

TEST(ApplyMask, RectangleKeepsOrderAndAlignment) {
  std::vector<Eigen::Vector2d> pts = {{5, 5},  {30, 30}, {12, 40}, {31, 35}, {60, 10},
                                      {70, 70}, {35, 31}, {2, 78},  {90, 5},  {45, 60}};
  MaskImage mask = FilledMask(100, 80, false);
  // Exclude [28, 40) x [28, 40): keypoints 1, 3, 6 fall inside.
  for (int y = 28; y < 40; ++y)
    for (int x = 28; x < 40; ++x) mask.excluded[static_cast<std::size_t>(y) * 100 + x] = 1;
  // Point-in-region oracle.
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool inside = pts[i].x() >= 28 && pts[i].x() < 40 && pts[i].y() >= 28 && pts[i].y() < 40;
    if (!inside) expected.push_back(i);
  }
  ASSERT_EQ(expected.size(), 7u);
  const auto f = TaggedFeatures(pts);
  const auto out = ApplyMask(f, mask);
  ASSERT_EQ(out.size(), 7u);
  for (std::size_t r = 0; r < out.size(); ++r) {
    Eigen::Index tag;
    out.descriptors.row(static_cast<Eigen::Index>(r)).maxCoeff(&tag);
    EXPECT_EQ(static_cast<std::size_t>(tag), expected[r]);
    EXPECT_EQ(out.keypoints[r], f.keypoints[expected[r]]);
  }
  const auto twice = ApplyMask(out, mask);
  EXPECT_EQ(twice.keypoints, out.keypoints);
  EXPECT_EQ(twice.descriptors, out.descriptors);
}

TEST(ApplyMask, BottomBand) {
  const auto f = TaggedFeatures({{10, 10}, {10, 75}, {10, 59.9}, {10, 60}});
  const auto out = ApplyMask(f, FilledMask(100, 80, false), 0.25);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.keypoints[0].y, 10);
  EXPECT_EQ(out.keypoints[1].y, 59.9);
}

TEST(ApplyMask, DimensionMismatch) {
  const auto f = TaggedFeatures({{150, 10}});
  try {
    ApplyMask(f, FilledMask(100, 80, false));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Mask, LoadAndResizeFromPgm) {
  const auto dir = testing::TempDir("mask");
  GrayRaster raster{16, 8, 255, std::vector<std::uint16_t>(128, 0)};
  for (int x = 0; x < 16; ++x) raster.pixels[7 * 16 + x] = 200;  // bottom row
  WritePgm(dir / "mask.pgm", raster);
  const MaskImage mask = LoadMask(dir / "mask.pgm");
  EXPECT_EQ(mask.width, 16);
  EXPECT_TRUE(mask.at(3, 7));
  EXPECT_FALSE(mask.at(3, 6));
  ResizePlan plan;
  plan.scaled_width = plan.output_width = 8;
  plan.scaled_height = plan.output_height = 4;
  const MaskImage small = ResizeMask(mask, plan);
  EXPECT_EQ(small.width, 8);
  EXPECT_TRUE(small.at(0, 3));
  EXPECT_FALSE(small.at(0, 2));
}

TEST(Undistort, ZeroDistortionIsIdentity) {
  PinholeCamera cam{500, 500, 320, 240, 640, 480};
  std::vector<Eigen::Vector2d> pts = {{0, 0}, {400.25, 300.5}, {639, 479}};
  const auto out = UndistortKeypoints(cam, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_TRUE(out[i].converged);
    EXPECT_EQ(out[i].pixel, pts[i]);
  }
}

TEST(Undistort, PrincipalPointFixedUnderRadial) {
  PinholeCamera cam{500, 500, 320, 240, 640, 480, {-0.2, 0.05, 0, 0}};
  std::vector<Eigen::Vector2d> pts = {{320, 240}};
  const auto out = UndistortKeypoints(cam, pts);
  EXPECT_TRUE(out[0].converged);
  EXPECT_EQ(out[0].pixel, Eigen::Vector2d(320, 240));
}

TEST(Undistort, ForwardModelReproducesInput) {
  PinholeCamera cam{500, 500, 320, 240, 640, 480, {-0.1, 0, 0, 0}};
  std::vector<Eigen::Vector2d> pts = {{400, 300}};
  const auto out = UndistortKeypoints(cam, pts);
  ASSERT_TRUE(out[0].converged);
  // Forward-distort oracle, written out independently.
  const double x = (out[0].pixel.x() - 320) / 500, y = (out[0].pixel.y() - 240) / 500;
  const double s = 1 - 0.1 * (x * x + y * y);
  EXPECT_NEAR(500 * x * s + 320, 400, 1e-6);
  EXPECT_NEAR(500 * y * s + 240, 300, 1e-6);
  // Barrel distortion pulls points inward, so undistortion pushes outward.
  EXPECT_GT(out[0].pixel.x(), 400);
}

TEST(Undistort, RoundTripPropertyStrongDistortion) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> k1d(-0.3, 0.3), small(-0.02, 0.02);
  std::uniform_real_distribution<double> u(0, 640), v(0, 480);
  for (int trial = 0; trial < 50; ++trial) {
    PinholeCamera cam{500, 500, 320, 240, 640, 480,
                      {k1d(rng), small(rng), small(rng) * 0.05, small(rng) * 0.05}};
    std::vector<Eigen::Vector2d> distorted, truth;
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector2d undist(u(rng), v(rng));
      truth.push_back(undist);
      distorted.push_back(cam.NormalizedToImage(
          DistortNormalized(cam.distortion, cam.ImageToNormalized(undist))));
    }
    const auto out = UndistortKeypoints(cam, distorted);
    for (std::size_t i = 0; i < out.size(); ++i) {
      ASSERT_TRUE(out[i].converged);
      const Eigen::Vector2d back = cam.NormalizedToImage(
          DistortNormalized(cam.distortion, cam.ImageToNormalized(out[i].pixel)));
      EXPECT_LT((back - distorted[i]).norm(), 1e-6);
      EXPECT_LT((out[i].pixel - truth[i]).norm(), 1e-5);
    }
  }
}

TEST(Undistort, UnreachablePointIsFlagged) {
  // With k1 = -0.3 the forward model saturates at r ~= 0.70 normalized, so a
  // distorted radius of 0.9 has no preimage.
  PinholeCamera cam{500, 500, 320, 240, 640, 480, {-0.3, 0, 0, 0}};
  std::vector<Eigen::Vector2d> pts = {{320 + 450, 240}};
  const auto out = UndistortKeypoints(cam, pts);
  EXPECT_FALSE(out[0].converged);
}

}  // namespace
}  // namespace locpipe
