// Acceptance gate: one PASS/FAIL line per headline criterion. Exit status is
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "locpipe/harness/config.h"
#include "locpipe/harness/pipeline.h"
#include "locpipe/harness/synthetic.h"
#include "locpipe/localization/clustering.h"
#include "locpipe/localization/correspondences.h"
#include "locpipe/localization/perceptual.h"
#include "locpipe/localization/pnp.h"
#include "locpipe/mapping/uncertainty.h"
#include "locpipe/matching/matcher.h"
#include "locpipe/pose_refine/icp.h"
#include "locpipe/pose_refine/point_cloud.h"
#include "locpipe/preprocess/preprocess.h"
#include "locpipe/retrieval/global_descriptor.h"
#include "locpipe/retrieval/retrieval.h"
#include "locpipe/retrieval/vlad.h"
#include "locpipe/scene/camera.h"
#include "locpipe/util/error.h"
#include "test_util.h"

namespace locpipe {
namespace {

namespace fs = std::filesystem;

const PinholeCamera kCamera{500, 500, 320, 240, 640, 480};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string Format(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

// 1. Observation Jacobian against central differences.
Outcome JacobianCriterion() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> focal(50, 2000), depth(0.1, 100), unit(-1, 1);
  int good = 0;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const PinholeCamera cam{focal(rng), focal(rng), 320, 240, 640, 480};
    const RigidPose pose = testing::RandomPose(rng, 10.0);
    const double z = depth(rng);
    const Eigen::Vector3d pc(unit(rng) * 0.5 * z, unit(rng) * 0.5 * z, z);
    const Eigen::Vector3d pw = pose.Inverse() * pc;
    const auto j = ObservationJacobian(cam, pose, pw);
    const double h = 1e-6 * std::max(1.0, pw.norm());
    Eigen::Matrix<double, 2, 3> fd;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d d = Eigen::Vector3d::Zero();
      d[k] = h;
      fd.col(k) = (Project(cam, pose, pw + d) - Project(cam, pose, pw - d)) / (2 * h);
    }
    const double rel = (j - fd).norm() / j.norm();
    worst = std::max(worst, rel);
    good += rel < 1e-6;
  }
  const double t = Seconds(start);
  return {good == 1000 && t < 5.0,
          Format("%.0f/1000 within 1e-6 relative (worst %.2e), %.2f s", good, worst, t)};
}

std::vector<ObservingView> RandomViews(std::mt19937_64& rng, const Eigen::Vector3d& p, int n) {
  std::vector<ObservingView> views;
  for (int v = 0; v < n; ++v) {
    const Eigen::Vector3d c = p + testing::RandomVector(rng, 1.0).normalized() * 5.0;
    views.push_back({kCamera, LookAtPose(c, p)});
  }
  return views;
}

// 2. Single-view rank 2 and eigenvalue monotonicity.
Outcome UncertaintyCriterion() {
  std::mt19937_64 rng(202);
  int rank_ok = 0, mono_ok = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d p = testing::RandomVector(rng, 3.0);
    const auto views = RandomViews(rng, p, 1);
    const Eigen::Vector3d l =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(PointInformation(p, views).information).eigenvalues();
    rank_ok += l[0] < 1e-10 * l[2] && l[1] > 1e-10 * l[2];
  }
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d p = testing::RandomVector(rng, 3.0);
    const auto all = RandomViews(rng, p, 5);
    Eigen::Vector3d previous = Eigen::Vector3d::Zero();
    bool ok = true;
    for (int k = 1; k <= 5; ++k) {
      const std::vector<ObservingView> prefix(all.begin(), all.begin() + k);
      const Eigen::Vector3d l = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(
                                    PointInformation(p, prefix).information)
                                    .eigenvalues();
      for (int e = 0; e < 3; ++e) ok = ok && l[e] >= previous[e] - 1e-9 * l[2];
      previous = l;
    }
    mono_ok += ok;
  }
  return {rank_ok == 100 && mono_ok == 100,
          Format("rank 2 in %.0f/100, monotone in %.0f/100", rank_ok, mono_ok)};
}

// 3. Two-view sigma_max across baseline angles.
Outcome BaselineCriterion() {
  const Eigen::Vector3d p(0, 0, 0);
  std::string detail;
  bool ok = true;
  double previous = std::numeric_limits<double>::infinity();
  for (double deg : {1.0, 5.0, 15.0, 45.0, 90.0}) {
    const double t = deg * M_PI / 180.0;
    const std::vector<ObservingView> views = {
        {kCamera, LookAtPose(Eigen::Vector3d(0, 0, -5), p)},
        {kCamera, LookAtPose(5.0 * Eigen::Vector3d(std::sin(t), 0, -std::cos(t)), p)}};
    const double s = PointInformation(p, views).sigma_max;
    ok = ok && s < previous;
    previous = s;
    detail += Format("%g:%.4g ", deg, s);
  }
  return {ok, "sigma_max by angle " + detail};
}

// 4. 100 well-conditioned + 20 narrow-baseline points.
Outcome RefineCriterion() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(404);
  std::vector<PosedImage> images;
  for (int i = 0; i < 8; ++i) {
    const double a = i * M_PI / 4;
    const Eigen::Vector3d c(10 * std::cos(a), 1.0, 10 * std::sin(a));
    const Eigen::Vector3d twin = c + 0.05 * Eigen::Vector3d(-std::sin(a), 0, std::cos(a));
    for (int k = 0; k < 2; ++k) {
      PosedImage image;
      image.id = static_cast<image_t>(2 * i + k + 1);
      image.name = "img" + std::to_string(image.id);
      image.camera_id = 1;
      image.pose = LookAtPose(k == 0 ? c : twin, Eigen::Vector3d::Zero());
      images.push_back(image);
    }
  }
  // Keypoints are exact projections of the true points.
  std::uniform_int_distribution<int> ring(0, 7);
  std::set<point3D_t> good, narrow;
  std::vector<MapPoint> points;
  for (point3D_t id = 1; id <= 120; ++id) {
    MapPoint point{id, testing::RandomVector(rng, 1.0), {}};
    std::vector<image_t> views;
    if (id <= 100) {
      std::set<int> cams;
      while (cams.size() < 3) cams.insert(ring(rng));
      for (int c : cams) views.push_back(static_cast<image_t>(2 * c + 1));
      good.insert(id);
    } else {
      const int c = ring(rng);
      views = {static_cast<image_t>(2 * c + 1), static_cast<image_t>(2 * c + 2)};
      narrow.insert(id);
    }
    for (image_t v : views) {
      auto& kps = images[v - 1].keypoints;
      point.track.push_back({v, static_cast<std::uint32_t>(kps.size())});
      kps.push_back(Project(kCamera, images[v - 1].pose, point.position));
    }
    points.push_back(point);
  }
  SparseMap map;
  map.AddCamera({1, CameraModel::kPinhole, kCamera});
  for (auto& image : images) map.AddImage(image);
  for (auto& p : points) map.AddPoint(p);
  const RefineReport report = RefineMap(map);
  std::size_t kept = 0, rejected = 0;
  for (point3D_t id : good) kept += map.HasPoint(id);
  for (point3D_t id : narrow) rejected += !map.HasPoint(id);
  const double t = Seconds(start);
  return {kept >= 95 && rejected >= 19 && t < 10.0,
          Format("kept %.0f/100 well-conditioned, rejected %.0f/20 narrow (threshold %.4g), %.2f s",
                 kept, rejected, report.threshold, t)};
}

DescriptorMatrix RandomRows(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0, 1);
  DescriptorMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

// 5. VLAD against a brute-force implementation; soft assignment checks.
Outcome VladCriterion() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> nn(0, 200), kk(1, 16), dd(1, 32);
  double worst_hard = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = kk(rng), d = dd(rng), n = nn(rng);
    const Eigen::MatrixXd c = RandomRows(rng, k, d);
    const DescriptorMatrix x = RandomRows(rng, n, d);
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(k, d);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        double dist = 0;
        for (int e = 0; e < d; ++e) dist += (x(i, e) - c(j, e)) * (x(i, e) - c(j, e));
        if (dist < best_d) {
          best_d = dist;
          best = j;
        }
      }
      for (int e = 0; e < d; ++e) oracle(best, e) += x(i, e) - c(best, e);
    }
    for (int j = 0; j < k; ++j) {
      double norm = 0;
      for (int e = 0; e < d; ++e) norm += oracle(j, e) * oracle(j, e);
      if (norm > 0) oracle.row(j) /= std::sqrt(norm);
    }
    double total = 0;
    for (int j = 0; j < k; ++j) {
      for (int e = 0; e < d; ++e) total += oracle(j, e) * oracle(j, e);
    }
    if (total > 0) oracle /= std::sqrt(total);
    const Eigen::MatrixXd v = VladHard(x, Codebook::FromCentroids(c, 1.0));
    worst_hard = std::max(worst_hard, (v - oracle).cwiseAbs().maxCoeff());
  }
  double worst_sum = 0, worst_limit = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 6, d = 8;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, d);
    for (int i = 0; i < k; ++i) c(i, i) = 1.0;
    std::normal_distribution<double> noise(0, std::sqrt(2.0) / 10 / std::sqrt(double(d)));
    std::uniform_int_distribution<int> which(0, k - 1);
    DescriptorMatrix x(100, d);
    for (int i = 0; i < 100; ++i) {
      x.row(i) = c.row(which(rng));
      for (int j = 0; j < d; ++j) x(i, j) += noise(rng);
    }
    const Codebook soft = Codebook::FromCentroids(c, 0.5 + trial);
    const Eigen::MatrixXd w = SoftAssign(x, soft);
    for (Eigen::Index i = 0; i < w.rows(); ++i) worst_sum = std::max(worst_sum, std::abs(w.row(i).sum() - 1.0));
    const Codebook sharp = Codebook::FromCentroids(c, 1e4);
    worst_limit = std::max(worst_limit, (VladSoft(x, sharp) - VladHard(x, sharp)).cwiseAbs().maxCoeff());
  }
  return {worst_hard <= 1e-12 && worst_sum <= 1e-9 && worst_limit <= 1e-5,
          Format("hard vs oracle %.1e, soft weight sum error %.1e, alpha=1e4 gap %.1e", worst_hard,
                 worst_sum, worst_limit)};
}

// 6. Retrieval on 1000 descriptors and fused cosine.
Outcome RetrievalCriterion() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g(0, 1);
  auto random_parts = [&](int f) {
    std::vector<NamedVector> parts;
    for (int i = 0; i < f; ++i) {
      Eigen::VectorXd v(16 + 8 * i);
      for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = g(rng);
      parts.push_back({"part" + std::to_string(i), v});
    }
    return parts;
  };
  RetrievalIndex index;
  std::vector<GlobalDescriptor> db;
  for (image_t i = 0; i < 1000; ++i) {
    db.push_back(Fuse(random_parts(2)));
    index.Add(i, db.back());
  }
  int exact = 0;
  for (int q = 0; q < 50; ++q) {
    const GlobalDescriptor query = Fuse(random_parts(2));
    std::vector<std::pair<double, image_t>> oracle;
    for (image_t i = 0; i < 1000; ++i) {
      double dot = 0;
      for (Eigen::Index j = 0; j < query.fused.size(); ++j) dot += query.fused[j] * db[i].fused[j];
      oracle.push_back({-dot, i});
    }
    std::sort(oracle.begin(), oracle.end());
    const auto hits = index.Retrieve(query, 1000);
    bool same = hits.size() == 1000;
    for (std::size_t r = 0; same && r < 1000; ++r) same = hits[r].image_id == oracle[r].second;
    exact += same;
  }
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int f = 1 + trial % 4;
    const auto a = random_parts(f), b = random_parts(f);
    double mean = 0;
    for (int i = 0; i < f; ++i) mean += a[i].vector.normalized().dot(b[i].vector.normalized()) / f;
    worst = std::max(worst, std::abs(FusedCosine(Fuse(a), Fuse(b)) - mean));
  }
  return {exact == 50 && worst <= 1e-9,
          Format("%.0f/50 full rankings equal exhaustive sort over 1000, fused cosine error %.1e",
                 exact, worst)};
}

// 7. PnP-RANSAC: 50 correspondences, 30% outliers, 1 px noise.
Outcome PnpCriterion() {
  const auto start = std::chrono::steady_clock::now();
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(7000 + seed);
    const RigidPose truth = testing::RandomPose(rng, 3.0);
    std::uniform_real_distribution<double> ux(20, 620), uy(20, 460), depth(1.0, 3.0);
    std::normal_distribution<double> noise(0, 1.0);
    std::vector<Correspondence2D3D> cs;
    std::set<std::uint32_t> planted;
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector2d px(ux(rng), uy(rng));
      Correspondence2D3D c;
      c.query_keypoint = static_cast<std::uint32_t>(i);
      c.point_id = static_cast<point3D_t>(i);
      c.point = Unproject(kCamera, truth, px, depth(rng));
      c.pixel = px + Eigen::Vector2d(noise(rng), noise(rng));
      if (i < 15) {
        Eigen::Vector2d bad;
        std::uniform_real_distribution<double> ax(0, 640), ay(0, 480);
        do bad = {ax(rng), ay(rng)}; while ((bad - px).norm() < 50);
        c.pixel = bad;
      } else {
        planted.insert(c.query_keypoint);
      }
      cs.push_back(c);
    }
    PnpOptions options;
    options.seed = seed;
    try {
      const PoseEstimate e = EstimatePose(cs, kCamera, options);
      std::set<std::uint32_t> found;
      for (const auto& c : e.inliers) found.insert(c.query_keypoint);
      good += RotationAngleDeg(e.pose.rotation(), truth.rotation()) < 0.5 &&
              (e.pose.Center() - truth.Center()).norm() < 0.01 && found == planted;
    } catch (const Error&) {
    }
  }
  const double t = Seconds(start);
  return {good >= 95 && t < 30.0,
          Format("%.0f/100 seeds within 0.5 deg / 0.01 with exact inlier set (points 1-3 units deep), %.2f s",
                 good, t)};
}

std::vector<RerankedCandidate> MatchAll(const SyntheticScene& scene, const SyntheticQuery& q) {
  std::vector<RerankedCandidate> out;
  std::size_t rank = 0;
  for (const auto& [id, f] : scene.db_features) out.push_back({id, rank++, MatchDescriptors(q.features, f)});
  return out;
}

// 8. Repetitive layout: pooled PnP fails, cluster-wise succeeds.
Outcome ClusterCriterion() {
  int good = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneSpec spec;
    spec.layout = SceneLayout::kRepetitive;
    spec.num_points = 60;
    spec.num_queries = 1;
    spec.seed = 800 + seed;
    const SyntheticScene scene = GenerateScene(spec);
    const SyntheticQuery& q = scene.queries.front();
    const auto candidates = MatchAll(scene, q);
    PnpOptions pnp;
    pnp.seed = seed;
    double pooled = 180, clustered = 180;
    try {
      const auto corrs = BuildCorrespondences(q.features.keypoints, candidates, scene.map, &q.camera);
      pooled = RotationAngleDeg(EstimatePose(corrs, q.camera, pnp).pose.rotation(), q.gt_pose.rotation());
    } catch (const Error&) {
    }
    try {
      std::vector<image_t> ids;
      for (const auto& c : candidates) ids.push_back(c.image_id);
      const auto clusters = ClusterCandidates(scene.map, ids, ClusterOptions{});
      const auto estimates =
          LocalizeClusterwise(q.features.keypoints, q.camera, candidates, clusters, scene.map, pnp);
      clustered = RotationAngleDeg(estimates.front().pose.rotation(), q.gt_pose.rotation());
    } catch (const Error&) {
    }
    good += pooled > 5.0 && clustered < 0.5;
    detail += Format("%.1f/%.2g ", pooled, clustered);
  }
  return {good >= 9, Format("%.0f/10 seeds (pooled/cluster-wise deg: ", good) + detail + ")"};
}

// 9. ICP on 2000-point surface clouds.
Outcome IcpCriterion() {
  const auto start = std::chrono::steady_clock::now();
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(900 + seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Eigen::Vector3d> target;
    for (int i = 0; i < 2000; ++i) {
      const double x = 2.0 * u(rng), y = 1.2 * u(rng);
      target.emplace_back(x, y, 0.5 * std::sin(1.7 * x) * std::cos(2.3 * y) + 0.15 * x * x - 0.1 * y);
    }
    const double diameter = PointCloud{target}.Diameter();
    const RigidPose truth = testing::RandomPose(rng, 3.0);
    PointCloud source;
    for (const auto& p : target) source.points.push_back(truth * p);
    const Eigen::Vector3d axis = testing::RandomVector(rng, 1.0).normalized();
    const Eigen::Vector3d dir = testing::RandomVector(rng, 1.0).normalized();
    const RigidPose delta = RigidPose::FromMatrix(
        Eigen::AngleAxisd(10.0 * M_PI / 180, axis).toRotationMatrix(), 0.1 * diameter * dir);
    const RigidPose initial = Compose(delta, truth.Inverse()).Inverse();
    try {
      const IcpResult r = IcpRefine(source, KdTree(target), initial);
      bool monotone = true;
      for (std::size_t i = 1; i < r.rms.size(); ++i) monotone = monotone && r.rms[i] <= r.rms[i - 1] + 1e-12 * r.rms[0];
      good += RotationAngleDeg(r.pose.rotation(), truth.rotation()) < 0.5 &&
              (r.pose.Center() - truth.Center()).norm() < 1e-3 * diameter && monotone;
    } catch (const Error&) {
    }
  }
  const double t = Seconds(start);
  return {good == 20 && t < 20.0, Format("%.0f/20 seeds recovered, RMS non-increasing, %.2f s", good, t)};
}

// 10. Identity warp distance and textured-scene impostor ranking.
Outcome PerceptualCriterion() {
  const GradientPyramidEncoder encoder;
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0, 1), d(2, 9);
  const PinholeCamera small{60, 60, 32, 24, 64, 48};
  Raster image(48, 64), depth(48, 64);
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    image.data()[i] = u(rng);
    depth.data()[i] = d(rng);
  }
  const RigidPose pose = testing::RandomPose(rng, 2.0);
  const WarpedView w = ForwardWarp(image, depth, small, pose, small, pose);
  const double identity = PerceptualDistance(encoder.Encode(image, nullptr), encoder.Encode(w.image, &w.valid));

  int good = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneSpec spec;
    spec.layout = SceneLayout::kTextured;
    spec.render = true;
    spec.num_points = 600;
    spec.num_db = 12;
    spec.num_queries = 1;
    spec.width = 160;
    spec.height = 120;
    spec.focal = 125;
    spec.seed = 1000 + seed;
    const SyntheticScene scene = GenerateScene(spec);
    const SyntheticQuery& q = scene.queries.front();
    // Reference: the database image sharing the most points with the query.
    std::set<point3D_t> seen(q.keypoint_points.begin(), q.keypoint_points.end());
    image_t ref = 0;
    std::size_t best = 0;
    for (const auto& [id, img] : scene.map.Images()) {
      std::size_t shared = 0;
      for (const auto& [kp, pid] : img.observed_points) shared += seen.count(pid);
      if (shared > best) {
        best = shared;
        ref = id;
      }
    }
    Correspondence2D3D c;
    c.db_image = ref;
    PoseEstimate correct, impostor;
    correct.pose = q.gt_pose;
    correct.inliers = {c};
    correct.cluster_id = 0;
    // 2 m sideways along the camera's right axis, on whichever side stays
    // inside the room.
    Eigen::Vector3d right = q.gt_pose.RotationMatrix().row(0).transpose();
    right.y() = 0;
    Eigen::Vector3d offset = 2.0 * right.normalized();
    if (((q.gt_pose.Center() + offset).cwiseAbs() - kRoomHalfExtent).maxCoeff() > -0.5) offset = -offset;
    impostor.pose = RigidPose::FromCenter(q.gt_pose.RotationMatrix(), q.gt_pose.Center() + offset);
    impostor.inliers = {c};
    impostor.cluster_id = 1;
    ReferenceLookup refs = [&](image_t id) -> std::optional<ReferenceView> {
      return ReferenceView{&scene.db_images.at(id), &scene.db_depths.at(id), scene.map.CameraOf(id),
                           scene.map.Image(id).pose};
    };
    const auto ranked = RerankClustersPerceptual(*q.image, q.camera, {impostor, correct}, refs, encoder);
    const bool ok = ranked.front().cluster_id == 0 && ranked[0].perceptual_distance &&
                    ranked[1].perceptual_distance && *ranked[0].perceptual_distance < *ranked[1].perceptual_distance;
    good += ok;
    detail += Format("%.3g<%.3g ", *ranked[0].perceptual_distance, *ranked[1].perceptual_distance);
  }
  return {identity == 0.0 && good == 10,
          Format("identity distance %g, correct below 2 m impostor in %.0f/10 (", identity, good) + detail + ")"};
}

// 11. End-to-end pipeline on synthetic scenes.
Outcome EndToEndCriterion() {
  const fs::path root = testing::TempDir("acceptance_e2e");
  std::size_t exact_ok = 0, exact_total = 0, noisy_ok = 0, noisy_total = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (bool noisy : {false, true}) {
      Config config;
      config.Set("seed", std::to_string(1100 + seed));
      config.Set("synth.num_queries", "20");
      if (noisy) {
        config.Set("synth.noise_px", "1");
        config.Set("synth.distractor_fraction", "0.2");
      }
      const Workspace ws{root / (std::to_string(seed) + (noisy ? "n" : "z"))};
      const SyntheticScene scene = GenerateScene(SceneSpec::FromConfig(config));
      WriteSyntheticWorkspace(scene, ws, config);
      const PipelineResult r = RunPipeline(ws, config);
      for (const auto& q : r.report->queries) {
        if (noisy) {
          // Default thresholds scaled by diameter / 10: the (0.25, 2 deg) pair.
          ++noisy_total;
          noisy_ok += q.localized && q.error.translation <= 0.25 * scene.diameter / 10 &&
                      q.error.rotation_deg <= 2.0;
        } else {
          ++exact_total;
          exact_ok += q.localized && q.error.translation < 1e-4 * scene.diameter &&
                      q.error.rotation_deg < 0.05;
        }
      }
    }
  }
  fs::remove_all(root);
  const double noisy_rate = noisy_total ? double(noisy_ok) / double(noisy_total) : 0.0;
  return {exact_ok == exact_total && exact_total > 0 && noisy_rate >= 0.95,
          Format("zero noise %.0f/%.0f within (1e-4 diam, 0.05 deg); noisy %.0f/%.0f within scaled (0.25, 2 deg)",
                 exact_ok, exact_total, noisy_ok, noisy_total)};
}

// 12. Resize rule.
Outcome ResizeCriterion() {
  const ResizePlan a = PlanResize(1920, 1080), b = PlanResize(4032, 3024);
  return {a.output_width == 1600 && a.output_height == 896 && b.output_width == 1600 &&
              b.output_height == 1200,
          Format("1920x1080 -> %.0fx%.0f, 4032x3024 -> %.0fx%.0f", a.output_width, a.output_height,
                 b.output_width, b.output_height)};
}

}  // namespace
}  // namespace locpipe

int main() {
  using locpipe::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"jacobian", locpipe::JacobianCriterion},
      {"uncertainty-structure", locpipe::UncertaintyCriterion},
      {"baseline-sweep", locpipe::BaselineCriterion},
      {"map-refinement", locpipe::RefineCriterion},
      {"vlad-oracle", locpipe::VladCriterion},
      {"retrieval", locpipe::RetrievalCriterion},
      {"pnp-ransac", locpipe::PnpCriterion},
      {"clusterwise-disambiguation", locpipe::ClusterCriterion},
      {"icp", locpipe::IcpCriterion},
      {"perceptual-rerank", locpipe::PerceptualCriterion},
      {"end-to-end", locpipe::EndToEndCriterion},
      {"resize-rule", locpipe::ResizeCriterion},
  };
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  const double total = locpipe::Seconds(start);
  std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
