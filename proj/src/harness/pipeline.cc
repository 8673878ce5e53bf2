#include "locpipe/harness/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "locpipe/localization/clustering.h"
#include "locpipe/localization/perceptual.h"
#include "locpipe/mapping/pairs.h"
#include "locpipe/matching/matcher.h"
#include "locpipe/pose_refine/icp.h"
#include "locpipe/pose_refine/point_cloud.h"
#include "locpipe/preprocess/preprocess.h"
#include "locpipe/retrieval/retrieval.h"
#include "locpipe/scene/colmap_io.h"
#include "locpipe/util/error.h"
#include "locpipe/util/pgm.h"
#include "locpipe/util/raster.h"
#include "locpipe/util/text.h"

namespace locpipe {
namespace fs = std::filesystem;

namespace {

constexpr image_t kQueryIdBase = 0x80000000u;
constexpr double kImageMax = 65535.0;

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::ifstream OpenIn(const fs::path& path) {
  std::ifstream in(path);
  if (!in) ThrowError(ErrorCode::kIo, "cannot read " + path.string());
  return in;
}

// Runs fn(i) for i in [0, n) on a small pool; rethrows the first failure.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::vector<double> ParseDoubles(const std::vector<std::string>& items, const std::string& key) {
  std::vector<double> out;
  for (const auto& s : items) {
    auto v = ParseDouble(s);
    if (!v) ThrowError(ErrorCode::kParseError, key + ": not a number: '" + s + "'");
    out.push_back(*v);
  }
  return out;
}

// The parts named in retrieval.descriptors, fused with retrieval.weights.
GlobalDescriptor LoadFusedGlobal(const Workspace& ws, const std::string& image,
                                 const Config& config) {
  const auto all = LoadGlobalDescriptors(ws.Global(image));
  std::vector<NamedVector> parts;
  for (const auto& name : config.GetList("retrieval.descriptors")) {
    auto it = std::find_if(all.begin(), all.end(), [&](const NamedVector& p) { return p.name == name; });
    if (it == all.end()) {
      ThrowError(ErrorCode::kMissingFeatures,
                 "global descriptor part '" + name + "' missing for " + image);
    }
    parts.push_back(*it);
  }
  const auto weights = ParseDoubles(config.GetList("retrieval.weights"), "retrieval.weights");
  return Fuse(parts, weights);
}

// Base mutual-NN matching with the optional guided pyramid fallback; the
// variants are the non-identity scale/orientation tags present in `a`.
class PipelineMatcher : public Matcher {
 public:
  explicit PipelineMatcher(const Config& config)
      : ratio_(config.GetDouble("matching.ratio")),
        threshold_(config.GetSize("matching.pyramid_threshold")) {
    const std::string& mode = config.GetString("matching.pyramid");
    if (mode == "all") {
      mode_ = PyramidMode::kAll;
    } else if (mode == "max") {
      mode_ = PyramidMode::kMax;
    } else if (mode != "off") {
      ThrowError(ErrorCode::kInvalidArgument, "matching.pyramid must be off, all or max");
    }
  }

  MatchSet Match(const LocalFeatureSet& a, const LocalFeatureSet& b) const override {
    MatchSet base = MatchDescriptors(a, b, ratio_);
    if (!mode_) return base;
    std::vector<PyramidVariant> variants;
    std::set<std::pair<double, double>> seen;
    for (const Keypoint& k : a.keypoints) {
      if (std::abs(k.scale - 1.0) <= 1e-6 && std::abs(k.orientation) <= 1e-6) continue;
      if (seen.emplace(k.scale, k.orientation).second) variants.push_back({k.scale, k.orientation});
    }
    if (variants.empty()) return base;
    return GuidedPyramidMatch(a, b, base, variants, *mode_, threshold_, ratio_);
  }

 private:
  double ratio_;
  std::size_t threshold_;
  std::optional<PyramidMode> mode_;
};

struct DbFeatures {
  std::map<image_t, LocalFeatureSet> sets;
  const LocalFeatureSet* Find(image_t id) const {
    auto it = sets.find(id);
    return it == sets.end() ? nullptr : &it->second;
  }
};

DbFeatures LoadDbFeatures(const Workspace& ws, const SparseMap& map) {
  DbFeatures db;
  for (const auto& [id, image] : map.Images()) {
    if (fs::exists(ws.Features(image.name))) db.sets.emplace(id, LoadFeatures(ws.Features(image.name), id));
  }
  return db;
}

LocalFeatureSet LoadQueryFeatures(const Workspace& ws, const QueryInfo& q, std::size_t index,
                                  const Config& config) {
  LocalFeatureSet f = LoadFeatures(ws.Features(q.name), kQueryIdBase + static_cast<image_t>(index));
  if (config.GetBool("preprocess.undistort") && q.camera.HasDistortion()) UndistortFeatures(q.camera, &f);
  return f;
}

std::optional<Raster> LoadImageIf(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  const GrayRaster g = ReadPgm(path);
  return ToRaster(g, 1.0 / g.maxval);
}

struct RetrievalEntry {
  std::string db_name;
  std::size_t rank = 0;
  std::size_t matches = 0;
};

std::map<std::string, std::vector<RetrievalEntry>> ReadRetrieval(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  std::map<std::string, std::vector<RetrievalEntry>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tok = SplitWhitespace(t);
    std::optional<long long> rank, matches;
    if (tok.size() == 4) {
      rank = ParseInt(tok[2]);
      matches = ParseInt(tok[3]);
    }
    if (!rank || !matches || *rank < 0 || *matches < 0) {
      ThrowError(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) +
                                             ": expected query db rank matches");
    }
    out[tok[0]].push_back({tok[1], static_cast<std::size_t>(*rank), static_cast<std::size_t>(*matches)});
  }
  return out;
}

std::vector<NamedPose> SortedPoses(std::vector<NamedPose> poses) {
  std::sort(poses.begin(), poses.end(),
            [](const NamedPose& a, const NamedPose& b) { return a.name < b.name; });
  return poses;
}

double SceneDiameter(const Workspace& ws) {
  std::ifstream in = OpenIn(ws.File("scene_info.txt"));
  std::string line;
  while (std::getline(in, line)) {
    const auto tok = SplitWhitespace(line);
    if (tok.size() == 2 && tok[0] == "diameter") {
      if (auto v = ParseDouble(tok[1])) return *v;
    }
  }
  ThrowError(ErrorCode::kParseError, "scene_info.txt has no diameter");
}

std::size_t Threads(const Config& config) {
  const long long t = config.GetInt("pipeline.threads");
  return t <= 0 ? 0 : static_cast<std::size_t>(t);
}

}  // namespace

fs::path Workspace::Features(const std::string& image) const {
  return root / "features" / (image + ".lfs");
}
fs::path Workspace::Global(const std::string& image) const {
  return root / "global" / (image + ".gds");
}
fs::path Workspace::Image(const std::string& image) const {
  return root / "images" / (image + ".pgm");
}
fs::path Workspace::Depth(const std::string& image) const {
  return root / "depth" / (image + ".dpt");
}

std::vector<QueryInfo> ReadQueries(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  std::vector<QueryInfo> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tok = SplitWhitespace(t);
    auto fail = [&](const std::string& what) {
      ThrowError(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    if (tok.size() < 5) fail("expected name MODEL width height params");
    const auto w = ParseInt(tok[2]), h = ParseInt(tok[3]);
    if (!w || !h) fail("bad image size");
    std::vector<double> params;
    for (std::size_t i = 4; i < tok.size(); ++i) {
      const auto v = ParseDouble(tok[i]);
      if (!v) fail("bad camera parameter '" + tok[i] + "'");
      params.push_back(*v);
    }
    const MapCamera cam = ParseCameraModel(tok[1], static_cast<int>(*w), static_cast<int>(*h), params);
    out.push_back({tok[0], cam.intrinsics, cam.model});
  }
  return out;
}

void WriteQueries(const fs::path& path, const std::vector<QueryInfo>& queries) {
  std::ofstream out = OpenOut(path);
  out.precision(17);
  for (const auto& q : queries) {
    MapCamera cam{0, q.model, q.camera};
    out << q.name << " " << CameraModelName(q.model) << " " << q.camera.width << " "
        << q.camera.height;
    for (double p : CameraModelParams(cam)) out << " " << p;
    out << "\n";
  }
}

Config LoadWorkspaceConfig(const Workspace& ws) {
  const fs::path path = ws.File("config.txt");
  return fs::exists(path) ? Config::Load(path) : Config();
}

void WriteSyntheticWorkspace(const SyntheticScene& scene, const Workspace& ws,
                             const Config& config) {
  fs::create_directories(ws.root);
  SaveColmapText(scene.map, ws.MapDir());
  config.Save(ws.File("config.txt"));
  {
    std::ofstream info = OpenOut(ws.File("scene_info.txt"));
    info.precision(17);
    info << "diameter " << scene.diameter << "\n";
    info << "layout " << SceneLayoutName(scene.spec.layout) << "\n";
  }
  SaveCodebook(ws.File("codebook.cbk"), scene.codebook);
  fs::create_directories(ws.root / "features");
  fs::create_directories(ws.root / "global");
  if (scene.spec.render) {
    fs::create_directories(ws.root / "images");
    fs::create_directories(ws.root / "depth");
  }
  for (const auto& [id, image] : scene.map.Images()) {
    SaveFeatures(ws.Features(image.name), scene.db_features.at(id));
    SaveGlobalDescriptors(ws.Global(image.name), scene.db_global.at(id));
  }
  std::vector<QueryInfo> queries;
  std::vector<NamedPose> gt;
  for (const auto& q : scene.queries) {
    SaveFeatures(ws.Features(q.name), q.features);
    SaveGlobalDescriptors(ws.Global(q.name), q.global);
    queries.push_back({q.name, q.camera, CameraModel::kPinhole});
    gt.push_back({q.name, q.gt_pose});
    if (q.image) WritePgm(ws.Image(q.name), ToGray(*q.image, 1.0 / kImageMax, 65535));
    if (q.depth) SaveDepthDpt(ws.Depth(q.name), *q.depth);
  }
  WriteQueries(ws.File("queries.txt"), queries);
  WritePoses(ws.File("gt_poses.txt"), SortedPoses(gt));
  for (const auto& [id, image] : scene.db_images) {
    WritePgm(ws.Image(scene.map.Image(id).name), ToGray(image, 1.0 / kImageMax, 65535));
  }
  for (const auto& [id, depth] : scene.db_depths) SaveDepthDpt(ws.Depth(scene.map.Image(id).name), depth);
}

void IngestMap(const fs::path& colmap_dir, const Workspace& ws) {
  const SparseMap map = LoadColmapText(colmap_dir);
  SaveColmapText(map, ws.MapDir());
}

RefineReport RefineMapStage(const Workspace& ws, const Config& config) {
  SparseMap map = LoadColmapText(ws.MapDir());
  RefineOptions opts;
  const std::string& th = config.GetString("mapping.sigma_threshold");
  if (!th.empty()) opts.sigma_threshold = config.GetDouble("mapping.sigma_threshold");
  opts.sigma_multiplier = config.GetDouble("mapping.sigma_mult");
  opts.min_track = config.GetSize("mapping.min_track");
  RefineReport report = RefineMap(map, opts);
  SaveColmapText(map, ws.MapDir());
  WriteRefineReport(ws.File("refine_report.txt"), report);
  return report;
}

std::size_t PairsStage(const Workspace& ws, const Config& config) {
  const SparseMap map = LoadColmapText(ws.MapDir());
  PairList pairs;
  for (const auto& source : config.GetList("mapping.pairs")) {
    std::string tag = source;
    std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char ch) { return std::toupper(ch); });
    switch (ParsePairSource(tag)) {
      case PairSource::kPose:
        pairs.Merge(PairsByPose(map, config.GetSize("mapping.pairs_k"),
                                config.GetDouble("mapping.pairs_radius")));
        break;
      case PairSource::kCovisibility:
        pairs.Merge(PairsByCovisibility(map, config.GetSize("mapping.covis_min")));
        break;
      case PairSource::kGlobal: {
        RetrievalIndex index;
        for (const auto& [id, image] : map.Images()) index.Add(id, LoadFusedGlobal(ws, image.name, config));
        pairs.Merge(PairsByGlobal(index, config.GetSize("mapping.pairs_k")));
        break;
      }
      case PairSource::kTemporal:
        pairs.Merge(PairsBySequence(map, config.GetSize("mapping.sequence_window")));
        break;
    }
  }
  WritePairs(ws.File("pairs.txt"), map, pairs);
  return pairs.size();
}

StageSummary RetrieveStage(const Workspace& ws, const Config& config) {
  const SparseMap map = LoadColmapText(ws.MapDir());
  const auto queries = ReadQueries(ws.File("queries.txt"));
  RetrievalIndex index;
  for (const auto& [id, image] : map.Images()) index.Add(id, LoadFusedGlobal(ws, image.name, config));
  const DbFeatures db = LoadDbFeatures(ws, map);
  const PipelineMatcher matcher(config);
  const std::size_t m = config.GetSize("retrieval.m"), n = config.GetSize("retrieval.n");

  std::vector<std::vector<RerankedCandidate>> results(queries.size());
  ParallelFor(queries.size(), Threads(config), [&](std::size_t i) {
    const auto hits = index.Retrieve(LoadFusedGlobal(ws, queries[i].name, config), m);
    std::vector<image_t> ids;
    for (const auto& h : hits) ids.push_back(h.image_id);
    const LocalFeatureSet qf = LoadQueryFeatures(ws, queries[i], i, config);
    results[i] = RerankByMatches(qf, ids, [&](image_t id) { return db.Find(id); }, matcher, n);
  });

  std::vector<std::size_t> order(queries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return queries[a].name < queries[b].name; });
  std::ofstream out = OpenOut(ws.File("retrieval.txt"));
  for (std::size_t i : order) {
    for (const auto& c : results[i]) {
      out << queries[i].name << " " << map.Image(c.image_id).name << " " << c.retrieval_rank << " "
          << c.matches.size() << "\n";
    }
  }
  return {queries.size(), 0, {}};
}

StageSummary LocalizeStage(const Workspace& ws, const Config& config) {
  const SparseMap map = LoadColmapText(ws.MapDir());
  const auto queries = ReadQueries(ws.File("queries.txt"));
  const auto retrieval = ReadRetrieval(ws.File("retrieval.txt"));
  const DbFeatures db = LoadDbFeatures(ws, map);
  const PipelineMatcher matcher(config);

  ClusterOptions cluster;
  cluster.method = ParseClusterMethod(config.GetString("cluster.method"));
  cluster.pose_radius = config.GetDouble("cluster.pose_radius");
  cluster.covis_threshold = config.GetSize("cluster.covis_threshold");
  PnpOptions pnp;
  pnp.threshold = config.GetDouble("pnp.threshold");
  pnp.min_iterations = config.GetSize("pnp.min_iterations");
  pnp.max_iterations = config.GetSize("pnp.max_iterations");
  pnp.confidence = config.GetDouble("pnp.confidence");
  pnp.min_inliers = config.GetSize("pnp.min_inliers");
  pnp.seed = config.GetSeed();

  const std::string& mode = config.GetString("rerank.mode");
  if (mode != "inlier" && mode != "perceptual") {
    ThrowError(ErrorCode::kInvalidArgument, "rerank.mode must be inlier or perceptual");
  }
  const bool perceptual = mode == "perceptual";
  std::map<image_t, Raster> db_images, db_depths;
  if (perceptual) {
    for (const auto& [id, image] : map.Images()) {
      if (auto img = LoadImageIf(ws.Image(image.name))) db_images.emplace(id, std::move(*img));
      if (fs::exists(ws.Depth(image.name))) {
        db_depths.emplace(id, LoadDepth(ws.Depth(image.name), config.GetDouble("depth.scale")));
      }
    }
  }
  const GradientPyramidEncoder encoder;

  struct Outcome {
    std::optional<PoseEstimate> best;
    std::size_t clusters = 0;
    std::string failure;
    std::string note;
  };
  std::vector<Outcome> outcomes(queries.size());
  ParallelFor(queries.size(), Threads(config), [&](std::size_t i) {
    const QueryInfo& q = queries[i];
    Outcome& out = outcomes[i];
    const LocalFeatureSet qf = LoadQueryFeatures(ws, q, i, config);
    std::vector<RerankedCandidate> candidates;
    std::vector<image_t> ids;
    if (auto it = retrieval.find(q.name); it != retrieval.end()) {
      for (const auto& e : it->second) {
        const auto id = map.FindImageByName(e.db_name);
        if (!id) ThrowError(ErrorCode::kUnknownImage, "retrieval.txt names unknown image " + e.db_name);
        const LocalFeatureSet* f = db.Find(*id);
        if (!f) ThrowError(ErrorCode::kMissingFeatures, "no features for " + e.db_name);
        candidates.push_back({*id, e.rank, matcher.Match(qf, *f)});
        ids.push_back(*id);
      }
    }
    const auto clusters = ClusterCandidates(map, ids, cluster);
    out.clusters = clusters.size();
    std::vector<PoseEstimate> estimates;
    try {
      estimates = LocalizeClusterwise(qf.keypoints, q.camera, candidates, clusters, map, pnp);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoPose && e.code() != ErrorCode::kTooFewCorrespondences) throw;
      out.failure = ErrorCodeName(e.code());
      return;
    }
    if (perceptual) {
      const auto query_image = LoadImageIf(ws.Image(q.name));
      if (!query_image) {
        out.note = " perceptual=skipped_no_image";
      } else {
        ReferenceLookup refs = [&](image_t id) -> std::optional<ReferenceView> {
          auto img = db_images.find(id);
          if (img == db_images.end()) return std::nullopt;
          auto dep = db_depths.find(id);
          return ReferenceView{&img->second, dep == db_depths.end() ? nullptr : &dep->second,
                               map.CameraOf(id), map.Image(id).pose};
        };
        estimates = RerankClustersPerceptual(*query_image, q.camera, std::move(estimates), refs, encoder);
      }
    }
    out.best = std::move(estimates.front());
  });

  StageSummary summary;
  summary.queries = queries.size();
  std::vector<std::size_t> order(queries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return queries[a].name < queries[b].name; });
  std::vector<NamedPose> poses;
  std::ofstream log = OpenOut(ws.File("localize_log.txt"));
  log.precision(10);
  for (std::size_t i : order) {
    const Outcome& o = outcomes[i];
    if (!o.best) {
      ++summary.failures;
      log << queries[i].name << " failed " << o.failure << " clusters=" << o.clusters << "\n";
      continue;
    }
    poses.push_back({queries[i].name, o.best->pose});
    log << queries[i].name << " ok cluster=" << o.best->cluster_id << " clusters=" << o.clusters
        << " inliers=" << o.best->inlier_count()
        << " correspondences=" << o.best->num_correspondences
        << " mean_error=" << o.best->mean_error;
    if (o.best->perceptual_distance) log << " perceptual=" << *o.best->perceptual_distance;
    log << o.note << "\n";
  }
  WritePoses(ws.File("poses_pnp.txt"), poses);
  return summary;
}

StageSummary RefineIcpStage(const Workspace& ws, const Config& config) {
  const auto poses = ReadPoses(ws.File("poses_pnp.txt"));
  StageSummary summary;
  summary.queries = poses.size();
  std::vector<NamedPose> refined = poses;
  if (config.GetBool("icp.enabled")) {
    const SparseMap map = LoadColmapText(ws.MapDir());
    const auto queries = ReadQueries(ws.File("queries.txt"));
    std::map<std::string, const QueryInfo*> by_name;
    for (const auto& q : queries) by_name[q.name] = &q;
    const int stride = static_cast<int>(config.GetInt("icp.stride"));
    const double depth_scale = config.GetDouble("depth.scale");
    IcpOptions opts;
    opts.trim = config.GetDouble("icp.trim");
    opts.max_iterations = static_cast<int>(config.GetInt("icp.max_iterations"));

    std::vector<Eigen::Vector3d> target;
    const std::string& source = config.GetString("icp.target");
    if (source == "sparse") {
      target = MapPointCloud(map).points;
    } else if (source == "dense") {
      for (const auto& [id, image] : map.Images()) {
        if (!fs::exists(ws.Depth(image.name))) continue;
        const PointCloud cloud =
            BackprojectDepth(map.CameraOf(id), LoadDepth(ws.Depth(image.name), depth_scale), stride);
        const RigidPose to_world = image.pose.Inverse();
        for (const auto& p : cloud.points) target.push_back(to_world * p);
      }
    } else {
      ThrowError(ErrorCode::kInvalidArgument, "icp.target must be sparse or dense");
    }
    if (target.empty()) {
      summary.warnings.push_back("icp: empty target cloud (" + source + "), poses unchanged");
    } else {
      const KdTree tree(std::move(target));
      std::vector<std::string> notes(refined.size());
      ParallelFor(refined.size(), Threads(config), [&](std::size_t i) {
        auto q = by_name.find(refined[i].name);
        if (q == by_name.end()) {
          ThrowError(ErrorCode::kNameMismatch, "poses_pnp.txt names unknown query " + refined[i].name);
        }
        const fs::path depth_path = ws.Depth(refined[i].name);
        if (!fs::exists(depth_path)) {
          notes[i] = refined[i].name + ": no depth, ICP skipped";
          return;
        }
        try {
          const PointCloud src =
              BackprojectDepth(q->second->camera, LoadDepth(depth_path, depth_scale), stride);
          refined[i].pose = IcpRefine(src, tree, refined[i].pose, opts).pose;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDiverged && e.code() != ErrorCode::kDegenerateCloud &&
              e.code() != ErrorCode::kAllInvalid) {
            throw;
          }
          notes[i] = refined[i].name + ": ICP " + ErrorCodeName(e.code()) + ", pose kept";
        }
      });
      for (auto& n : notes) {
        if (!n.empty()) summary.warnings.push_back(std::move(n));
      }
    }
  }
  WritePoses(ws.File("poses.txt"), refined);
  std::ofstream out = OpenOut(ws.File("warnings.txt"));
  for (const auto& w : summary.warnings) out << w << "\n";
  return summary;
}

EvalReport EvaluateStage(const Workspace& ws, const Config& config) {
  auto thresholds = ParseThresholds(config.GetString("eval.thresholds"));
  const std::string& scale_text = config.GetString("eval.translation_scale");
  double scale = 1.0;
  if (scale_text == "auto") {
    if (fs::exists(ws.File("scene_info.txt"))) scale = SceneDiameter(ws) / 10.0;
  } else {
    scale = config.GetDouble("eval.translation_scale");
  }
  for (auto& t : thresholds) t.translation *= scale;
  EvalReport report = Evaluate(ReadPoses(ws.File("poses.txt")), ReadPoses(ws.File("gt_poses.txt")),
                               thresholds, config.GetBool("eval.allow_missing"));
  WriteEvalReport(ws.File("report.txt"), report);
  return report;
}

PipelineResult RunPipeline(const Workspace& ws, const Config& config) {
  PipelineResult result;
  auto run = [&](const std::string& stage, auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const Error& e) {
      ThrowError(e.code(), stage + ": " + e.message());
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    result.timings.emplace_back(stage, dt.count());
  };
  if (config.GetBool("mapping.refine")) run("map-refine", [&] { RefineMapStage(ws, config); });
  run("retrieve", [&] { RetrieveStage(ws, config); });
  run("localize", [&] {
    const StageSummary s = LocalizeStage(ws, config);
    result.queries = s.queries;
    result.failures = s.failures;
  });
  run("refine-icp", [&] {
    const StageSummary s = RefineIcpStage(ws, config);
    result.warnings = s.warnings;
  });
  if (fs::exists(ws.File("gt_poses.txt"))) {
    Config eval_config = config;
    // Failed queries are reported through the exit status, not as an
    // evaluation error.
    if (result.failures > 0) eval_config.Set("eval.allow_missing", "true");
    run("evaluate", [&] { result.report = EvaluateStage(ws, eval_config); });
  }
  std::ofstream out = OpenOut(ws.File("timings.txt"));
  for (const auto& [stage, seconds] : result.timings) out << stage << " " << seconds << "\n";
  if (result.report) result.report->timings = result.timings;
  return result;
}

}  // namespace locpipe
