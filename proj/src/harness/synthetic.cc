#include "locpipe/harness/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Geometry>

#include "locpipe/mapping/triangulation.h"
#include "locpipe/scene/camera.h"
#include "locpipe/util/error.h"

namespace locpipe {
namespace {

constexpr double kMinFacing = 0.2;  // cos of the steepest viewing angle kept
constexpr int kMaxPlacementAttempts = 1000;
constexpr image_t kQueryImageBase = 0x80000000u;

using Rng = std::mt19937_64;

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double Gauss(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

Eigen::Matrix3d RotY(double deg) {
  return Eigen::AngleAxisd(deg * M_PI / 180.0, Eigen::Vector3d::UnitY()).toRotationMatrix();
}

// Geometry shared by all layouts before features are drawn.
struct Layout {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;
  std::vector<std::size_t> embedding;  // descriptor identity per point
  std::size_t num_embeddings = 0;
  std::vector<RigidPose> db_poses;
  // When set, the db image sees exactly these points (if in frame).
  std::vector<std::optional<std::vector<std::size_t>>> db_subset;
  std::vector<RigidPose> query_poses;
  std::optional<std::vector<std::size_t>> query_subset;
};

bool Visible(const PinholeCamera& cam, const RigidPose& pose, const Eigen::Vector3d& p,
             const Eigen::Vector3d& n) {
  const Eigen::Vector3d pc = pose * p;
  if (pc.z() <= 1e-6) return false;
  if (!cam.InImage(ProjectCameraPoint(cam, pc))) return false;
  const Eigen::Vector3d to_cam = (pose.Center() - p).normalized();
  return n.dot(to_cam) > kMinFacing;
}

std::vector<std::size_t> VisibleSet(const Layout& layout, const PinholeCamera& cam,
                                    const RigidPose& pose,
                                    const std::optional<std::vector<std::size_t>>& subset) {
  std::vector<std::size_t> out;
  auto consider = [&](std::size_t i) {
    if (Visible(cam, pose, layout.points[i], layout.normals[i])) out.push_back(i);
  };
  if (subset) {
    for (std::size_t i : *subset) consider(i);
    std::sort(out.begin(), out.end());
  } else {
    for (std::size_t i = 0; i < layout.points.size(); ++i) consider(i);
  }
  return out;
}

std::size_t CountViews(const Layout& layout, const PinholeCamera& cam, const Eigen::Vector3d& p,
                       const Eigen::Vector3d& n) {
  std::size_t views = 0;
  for (const RigidPose& pose : layout.db_poses) views += Visible(cam, pose, p, n);
  return views;
}

// Draws points from `sample` until each is seen by at least two db cameras.
template <typename Sampler>
void PlacePoints(const SceneSpec& spec, const PinholeCamera& cam, Rng& rng, Layout* layout,
                 Sampler sample) {
  const std::size_t max_attempts = kMaxPlacementAttempts * spec.num_points;
  std::size_t attempts = 0;
  while (layout->points.size() < spec.num_points) {
    if (++attempts > max_attempts) {
      ThrowError(ErrorCode::kInfeasibleSpec,
                 "could not place points seen by two cameras (" +
                     std::to_string(layout->points.size()) + " of " +
                     std::to_string(spec.num_points) + ")");
    }
    auto [p, n] = sample(rng);
    if (CountViews(*layout, cam, p, n) < 2) continue;
    layout->points.push_back(p);
    layout->normals.push_back(n);
  }
  layout->embedding.resize(layout->points.size());
  std::iota(layout->embedding.begin(), layout->embedding.end(), 0);
  layout->num_embeddings = layout->points.size();
  layout->db_subset.assign(layout->db_poses.size(), std::nullopt);
}

// Re-draws a query pose until it sees enough points to be localizable.
template <typename Sampler>
RigidPose PlaceQuery(const Layout& layout, const PinholeCamera& cam, Rng& rng,
                     std::size_t min_visible, Sampler sample) {
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    const RigidPose pose = sample(rng);
    if (VisibleSet(layout, cam, pose, layout.query_subset).size() >= min_visible) return pose;
  }
  ThrowError(ErrorCode::kInfeasibleSpec, "no query pose sees " +
                                             std::to_string(min_visible) + " points");
}

constexpr std::size_t kMinQueryPoints = 12;

Layout DefaultLayout(const SceneSpec& spec, const PinholeCamera& cam, Rng& rng) {
  Layout layout;
  constexpr double kRing = 12.0;
  for (std::size_t i = 0; i < spec.num_db; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(spec.num_db);
    const Eigen::Vector3d c(kRing * std::cos(a), Uniform(rng, -2.0, 2.0), kRing * std::sin(a));
    layout.db_poses.push_back(LookAtPose(c, Eigen::Vector3d::Zero()));
  }
  PlacePoints(spec, cam, rng, &layout, [](Rng& r) {
    Eigen::Vector3d dir(Gauss(r, 1.0), Gauss(r, 1.0), Gauss(r, 1.0));
    dir.normalize();
    const double radius = 4.0 * Uniform(r, 0.8, 1.2);
    return std::pair<Eigen::Vector3d, Eigen::Vector3d>(radius * dir, dir);
  });
  for (std::size_t q = 0; q < spec.num_queries; ++q) {
    layout.query_poses.push_back(PlaceQuery(layout, cam, rng, kMinQueryPoints, [](Rng& r) {
      const double a = Uniform(r, 0.0, 2.0 * M_PI);
      const double radius = kRing * Uniform(r, 0.85, 1.1);
      const Eigen::Vector3d c(radius * std::cos(a), Uniform(r, -2.0, 2.0), radius * std::sin(a));
      const Eigen::Vector3d target(Uniform(r, -0.5, 0.5), Uniform(r, -0.5, 0.5),
                                   Uniform(r, -0.5, 0.5));
      return LookAtPose(c, target);
    }));
  }
  return layout;
}

// Pattern A at the origin facing -z; copy B = (R_y(60 deg), (40, 0, 0)) * A
// with identical descriptors. Camera group A sees 70% of A. Groups B1 and B2
// (more than 5 units apart) each see 55% of B and together all of it, so
// pooling every correspondence favours B while each single cluster favours A.
Layout RepetitiveLayout(const SceneSpec& spec, const PinholeCamera& cam, Rng& rng) {
  if (spec.num_points < 8) {
    ThrowError(ErrorCode::kInfeasibleSpec, "repetitive layout needs at least 8 pattern points");
  }
  const std::size_t n = spec.num_points;
  const Eigen::Matrix3d rb = RotY(60.0);
  const Eigen::Vector3d tb(40.0, 0.0, 0.0);
  auto to_b = [&](const Eigen::Vector3d& p) -> Eigen::Vector3d { return rb * p + tb; };

  Layout layout;
  const Eigen::Vector3d facing(0.0, 0.0, -1.0);
  std::vector<Eigen::Vector3d> pattern;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = Uniform(rng, -3.0, 3.0), y = Uniform(rng, -2.0, 2.0);
    const double z = 0.4 * std::sin(1.3 * x) * std::cos(1.1 * y) + Uniform(rng, -0.2, 0.2);
    pattern.emplace_back(x, y, z);
  }
  for (std::size_t k = 0; k < n; ++k) {
    layout.points.push_back(pattern[k]);
    layout.normals.push_back(facing);
    layout.embedding.push_back(k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    layout.points.push_back(to_b(pattern[k]));
    layout.normals.push_back(rb * facing);
    layout.embedding.push_back(k);
  }
  layout.num_embeddings = n;

  const std::array<Eigen::Vector3d, 2> group = {Eigen::Vector3d(-1.5, 0.3, -10.0),
                                                Eigen::Vector3d(1.5, -0.3, -10.0)};
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t n_a = (7 * n + 9) / 10;
  std::vector<std::size_t> subset_a(perm.begin(), perm.begin() + static_cast<long>(n_a));

  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t n_b = (55 * n + 99) / 100;
  std::vector<std::size_t> subset_b1, subset_b2;
  for (std::size_t i = 0; i < n_b; ++i) subset_b1.push_back(n + perm[i]);
  for (std::size_t i = n - n_b; i < n; ++i) subset_b2.push_back(n + perm[i]);

  for (const auto& c : group) {
    layout.db_poses.push_back(LookAtPose(c, Eigen::Vector3d::Zero()));
    layout.db_subset.emplace_back(subset_a);
  }
  for (const auto& c : group) {
    layout.db_poses.push_back(LookAtPose(to_b(c), tb, rb * Eigen::Vector3d::UnitY()));
    layout.db_subset.emplace_back(subset_b1);
  }
  const Eigen::Matrix3d swing = RotY(60.0);
  for (const auto& c : group) {
    layout.db_poses.push_back(LookAtPose(to_b(swing * c), tb, rb * Eigen::Vector3d::UnitY()));
    layout.db_subset.emplace_back(subset_b2);
  }

  std::vector<std::size_t> all_a(n);
  std::iota(all_a.begin(), all_a.end(), 0);
  layout.query_subset = all_a;
  for (std::size_t q = 0; q < spec.num_queries; ++q) {
    layout.query_poses.push_back(PlaceQuery(layout, cam, rng, n, [](Rng& r) {
      const Eigen::Vector3d c(Uniform(r, -1.0, 1.0), Uniform(r, -0.5, 0.5),
                              -10.0 + Uniform(r, -1.0, 1.0));
      const Eigen::Vector3d target(Uniform(r, -0.3, 0.3), Uniform(r, -0.3, 0.3), 0.0);
      return LookAtPose(c, target);
    }));
  }
  return layout;
}

Layout TexturedLayout(const SceneSpec& spec, const PinholeCamera& cam, Rng& rng) {
  Layout layout;
  const Eigen::Vector3d& h = kRoomHalfExtent;
  constexpr double kRing = 2.5;
  for (std::size_t i = 0; i < spec.num_db; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(spec.num_db);
    const Eigen::Vector3d c(kRing * std::cos(a), Uniform(rng, -0.3, 0.3), kRing * std::sin(a));
    const Eigen::Vector3d dir(std::cos(a), Uniform(rng, -0.1, 0.1), std::sin(a));
    layout.db_poses.push_back(LookAtPose(c, c + 3.0 * dir));
  }
  // Faces weighted by area: +-x, +-y, +-z.
  const std::array<double, 6> area = {h.y() * h.z(), h.y() * h.z(), h.x() * h.z(),
                                      h.x() * h.z(), h.x() * h.y(), h.x() * h.y()};
  PlacePoints(spec, cam, rng, &layout, [&](Rng& r) {
    std::discrete_distribution<int> face(area.begin(), area.end());
    const int f = face(r);
    const int axis = f / 2;
    const double sign = (f % 2 == 0) ? 1.0 : -1.0;
    Eigen::Vector3d p(Uniform(r, -h.x(), h.x()), Uniform(r, -h.y(), h.y()),
                      Uniform(r, -h.z(), h.z()));
    p[axis] = sign * h[axis];
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    n[axis] = -sign;
    return std::pair<Eigen::Vector3d, Eigen::Vector3d>(p, n);
  });
  for (std::size_t q = 0; q < spec.num_queries; ++q) {
    layout.query_poses.push_back(PlaceQuery(layout, cam, rng, kMinQueryPoints, [](Rng& r) {
      const double a = Uniform(r, 0.0, 2.0 * M_PI);
      const double radius = Uniform(r, 2.0, 3.0);
      const Eigen::Vector3d c(radius * std::cos(a), Uniform(r, -0.3, 0.3), radius * std::sin(a));
      const double look = a + Uniform(r, -0.2, 0.2);
      const Eigen::Vector3d dir(std::cos(look), Uniform(r, -0.1, 0.1), std::sin(look));
      return LookAtPose(c, c + 3.0 * dir);
    }));
  }
  return layout;
}

DescriptorMatrix DrawDescriptors(const Eigen::MatrixXd& embeddings,
                                 const std::vector<std::size_t>& ids, double noise, Rng& rng) {
  DescriptorMatrix d(static_cast<Eigen::Index>(ids.size()), embeddings.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Eigen::VectorXd v = embeddings.row(static_cast<Eigen::Index>(ids[i])).transpose();
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] += Gauss(rng, noise);
    d.row(static_cast<Eigen::Index>(i)) = v.normalized().transpose();
  }
  return d;
}

std::vector<NamedVector> GlobalParts(const DescriptorMatrix& descriptors,
                                     const Codebook& codebook, double soft_alpha) {
  std::vector<NamedVector> parts;
  parts.push_back({"vlad", FlattenVlad(VladHard(descriptors, codebook))});
  if (soft_alpha > 0.0) parts.push_back({"netvlad", FlattenVlad(VladSoft(descriptors, codebook))});
  return parts;
}

std::string ImageName(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu.png", prefix, i);
  return buf;
}

}  // namespace

const char* SceneLayoutName(SceneLayout layout) {
  switch (layout) {
    case SceneLayout::kDefault: return "default";
    case SceneLayout::kRepetitive: return "repetitive";
    case SceneLayout::kTextured: return "textured";
  }
  return "?";
}

SceneLayout ParseSceneLayout(const std::string& name) {
  for (SceneLayout l : {SceneLayout::kDefault, SceneLayout::kRepetitive, SceneLayout::kTextured}) {
    if (name == SceneLayoutName(l)) return l;
  }
  ThrowError(ErrorCode::kInvalidArgument, "unknown scene layout '" + name + "'");
}

SceneSpec SceneSpec::FromConfig(const Config& config) {
  SceneSpec s;
  s.layout = ParseSceneLayout(config.GetString("synth.layout"));
  s.num_points = config.GetSize("synth.num_points");
  s.num_db = config.GetSize("synth.num_db");
  s.num_queries = config.GetSize("synth.num_queries");
  s.noise_px = config.GetDouble("synth.noise_px");
  s.distractor_fraction = config.GetDouble("synth.distractor_fraction");
  s.descriptor_dim = static_cast<int>(config.GetInt("synth.descriptor_dim"));
  s.descriptor_noise = config.GetDouble("synth.descriptor_noise");
  s.codebook_k = config.GetSize("synth.codebook_k");
  s.soft_alpha = config.GetDouble("synth.soft_alpha");
  s.width = static_cast<int>(config.GetInt("synth.width"));
  s.height = static_cast<int>(config.GetInt("synth.height"));
  s.focal = config.GetDouble("synth.focal");
  s.render = config.GetBool("synth.render");
  s.seed = config.GetSeed();
  return s;
}

RigidPose LookAtPose(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                     const Eigen::Vector3d& down) {
  const Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d y = down - down.dot(z) * z;
  if (y.norm() < 1e-9) {
    const Eigen::Vector3d alt = std::abs(z.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                      : Eigen::Vector3d::UnitZ();
    y = alt - alt.dot(z) * z;
  }
  y.normalize();
  const Eigen::Vector3d x = y.cross(z);
  Eigen::Matrix3d r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  return RigidPose::FromCenter(r, center);
}

double RoomTexture(const Eigen::Vector3d& p) {
  const double checker =
      (static_cast<long>(std::floor(p.x() / 0.5) + std::floor(p.y() / 0.5) +
                         std::floor(p.z() / 0.5)) & 1L) ? 0.15 : -0.15;
  const double waves = 0.2 * std::sin(3.1 * p.x() + 1.7 * p.y()) * std::cos(2.3 * p.z() - 1.1 * p.y()) +
                       0.1 * std::sin(7.3 * p.x() + 5.1 * p.z() + 2.9 * p.y());
  return std::clamp(0.5 + checker + waves, 0.0, 1.0);
}

RenderedView RenderRoom(const PinholeCamera& camera, const RigidPose& pose) {
  RenderedView view{Raster::Zero(camera.height, camera.width),
                    Raster::Zero(camera.height, camera.width)};
  const Eigen::Matrix3d rt = pose.RotationMatrix().transpose();
  const Eigen::Vector3d c = pose.Center();
  const Eigen::Vector3d& h = kRoomHalfExtent;
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      // Ray with unit camera-frame depth, so the hit parameter is the z-depth.
      const Eigen::Vector3d d =
          rt * Eigen::Vector3d((x - camera.cx) / camera.fx, (y - camera.cy) / camera.fy, 1.0);
      double t = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        if (d[a] > 0) t = std::min(t, (h[a] - c[a]) / d[a]);
        if (d[a] < 0) t = std::min(t, (-h[a] - c[a]) / d[a]);
      }
      if (!std::isfinite(t) || t <= 0) continue;
      view.depth(y, x) = t;
      view.image(y, x) = RoomTexture(c + t * d);
    }
  }
  return view;
}

SyntheticScene GenerateScene(const SceneSpec& spec) {
  if (spec.num_db < 2 && spec.layout != SceneLayout::kRepetitive) {
    ThrowError(ErrorCode::kInfeasibleSpec, "need at least 2 database cameras");
  }
  if (spec.num_points < 8) ThrowError(ErrorCode::kInfeasibleSpec, "need at least 8 points");
  if (spec.descriptor_dim < 1 || spec.codebook_k < 1 || spec.width < 2 || spec.height < 2 ||
      !(spec.focal > 0) || spec.noise_px < 0 || spec.descriptor_noise < 0 ||
      spec.distractor_fraction < 0 || spec.distractor_fraction > 1) {
    ThrowError(ErrorCode::kInfeasibleSpec, "invalid synthetic scene parameters");
  }
  if (spec.render && spec.layout != SceneLayout::kTextured) {
    ThrowError(ErrorCode::kInfeasibleSpec, "rendering is only available for the textured layout");
  }

  Rng rng(spec.seed);
  PinholeCamera cam;
  cam.fx = cam.fy = spec.focal;
  cam.width = spec.width;
  cam.height = spec.height;
  cam.cx = spec.width / 2.0;
  cam.cy = spec.height / 2.0;
  cam.Validate();

  Layout layout;
  switch (spec.layout) {
    case SceneLayout::kDefault: layout = DefaultLayout(spec, cam, rng); break;
    case SceneLayout::kRepetitive: layout = RepetitiveLayout(spec, cam, rng); break;
    case SceneLayout::kTextured: layout = TexturedLayout(spec, cam, rng); break;
  }

  SyntheticScene scene;
  scene.spec = spec;
  for (std::size_t i = 0; i < layout.points.size(); ++i) scene.gt_points[i + 1] = layout.points[i];
  Eigen::Vector3d lo = layout.points.front(), hi = lo;
  for (const auto& p : layout.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  scene.diameter = (hi - lo).norm();

  Eigen::MatrixXd embeddings(static_cast<Eigen::Index>(layout.num_embeddings), spec.descriptor_dim);
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) embeddings(i, j) = Gauss(rng, 1.0);
    embeddings.row(i).normalize();
  }

  MapCamera map_cam{1, CameraModel::kPinhole, cam};
  scene.map.AddCamera(map_cam);

  // Database images: one keypoint per visible point, in point order.
  std::map<std::size_t, std::vector<std::pair<image_t, std::uint32_t>>> tracks;
  std::vector<std::vector<Eigen::Vector2d>> db_pixels(layout.db_poses.size());
  DescriptorMatrix all_db(0, spec.descriptor_dim);
  std::vector<DescriptorMatrix> db_desc;
  for (std::size_t i = 0; i < layout.db_poses.size(); ++i) {
    const image_t id = static_cast<image_t>(i + 1);
    const RigidPose& pose = layout.db_poses[i];
    const auto visible = VisibleSet(layout, cam, pose, layout.db_subset[i]);
    PosedImage image;
    image.id = id;
    image.name = ImageName("db", i);
    image.camera_id = map_cam.id;
    image.pose = pose;
    image.timestamp = static_cast<std::int64_t>(i);
    LocalFeatureSet features;
    features.image_id = id;
    std::vector<std::size_t> emb;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      Eigen::Vector2d px = Project(cam, pose, layout.points[visible[k]]);
      px += Eigen::Vector2d(Gauss(rng, spec.noise_px), Gauss(rng, spec.noise_px));
      image.keypoints.push_back(px);
      features.keypoints.push_back({px.x(), px.y(), 1.0, 0.0});
      tracks[visible[k]].emplace_back(id, static_cast<std::uint32_t>(k));
      emb.push_back(layout.embedding[visible[k]]);
    }
    features.descriptors = DrawDescriptors(embeddings, emb, spec.descriptor_noise, rng);
    db_pixels[i] = image.keypoints;
    scene.map.AddImage(std::move(image));
    scene.db_features.emplace(id, std::move(features));
  }

  for (const auto& [idx, track] : tracks) {
    if (track.size() < 2) continue;
    std::vector<TriangulationObservation> obs;
    for (const auto& [img, kp] : track) obs.push_back({cam, layout.db_poses[img - 1], db_pixels[img - 1][kp]});
    TriangulatedPoint tp;
    try {
      tp = Triangulate(obs);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDegenerateGeometry) continue;
      throw;
    }
    MapPoint point;
    point.id = idx + 1;
    point.position = tp.position;
    point.error = tp.RmsResidual();
    for (const auto& [img, kp] : track) point.track.push_back({img, kp});
    scene.map.AddPoint(std::move(point));
  }

  // Codebook from all database descriptors, then global descriptors.
  Eigen::Index rows = 0;
  for (const auto& [id, f] : scene.db_features) rows += f.descriptors.rows();
  all_db.resize(rows, spec.descriptor_dim);
  rows = 0;
  for (const auto& [id, f] : scene.db_features) {
    all_db.middleRows(rows, f.descriptors.rows()) = f.descriptors;
    rows += f.descriptors.rows();
  }
  const int k = static_cast<int>(std::min<std::size_t>(spec.codebook_k, static_cast<std::size_t>(rows)));
  if (k < 1) ThrowError(ErrorCode::kInfeasibleSpec, "no database observations");
  scene.codebook = Codebook::FromCentroids(KMeans(all_db, k, 25, rng()), spec.soft_alpha > 0 ? spec.soft_alpha : 1.0);
  for (const auto& [id, f] : scene.db_features) {
    scene.db_global[id] = GlobalParts(f.descriptors, scene.codebook, spec.soft_alpha);
  }

  for (std::size_t q = 0; q < layout.query_poses.size(); ++q) {
    const RigidPose& pose = layout.query_poses[q];
    const auto visible = VisibleSet(layout, cam, pose, layout.query_subset);
    SyntheticQuery query;
    query.name = ImageName("query", q);
    query.camera = cam;
    query.gt_pose = pose;
    query.features.image_id = kQueryImageBase + static_cast<image_t>(q);
    std::vector<std::size_t> emb;
    for (std::size_t idx : visible) {
      Eigen::Vector2d px = Project(cam, pose, layout.points[idx]);
      px += Eigen::Vector2d(Gauss(rng, spec.noise_px), Gauss(rng, spec.noise_px));
      query.features.keypoints.push_back({px.x(), px.y(), 1.0, 0.0});
      query.keypoint_points.push_back(idx + 1);
      std::size_t e = layout.embedding[idx];
      if (spec.distractor_fraction > 0 && Uniform(rng, 0.0, 1.0) < spec.distractor_fraction &&
          layout.num_embeddings > 1) {
        // Descriptor of a different point: a wrong but confident match.
        const std::size_t shift = std::uniform_int_distribution<std::size_t>(1, layout.num_embeddings - 1)(rng);
        e = (e + shift) % layout.num_embeddings;
      }
      emb.push_back(e);
    }
    query.features.descriptors = DrawDescriptors(embeddings, emb, spec.descriptor_noise, rng);
    query.global = GlobalParts(query.features.descriptors, scene.codebook, spec.soft_alpha);
    if (spec.render) {
      RenderedView view = RenderRoom(cam, pose);
      query.image = std::move(view.image);
      query.depth = std::move(view.depth);
    }
    scene.queries.push_back(std::move(query));
  }

  if (spec.render) {
    for (const auto& [id, image] : scene.map.Images()) {
      RenderedView view = RenderRoom(cam, image.pose);
      scene.db_images[id] = std::move(view.image);
      scene.db_depths[id] = std::move(view.depth);
    }
  }
  return scene;
}

}  // namespace locpipe
