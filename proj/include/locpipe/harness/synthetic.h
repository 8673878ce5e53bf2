#ifndef LOCPIPE_HARNESS_SYNTHETIC_H_
#define LOCPIPE_HARNESS_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "locpipe/harness/config.h"
#include "locpipe/matching/features.h"
#include "locpipe/retrieval/global_descriptor.h"
#include "locpipe/retrieval/vlad.h"
#include "locpipe/scene/sparse_map.h"
#include "locpipe/util/raster.h"

namespace locpipe {

// kDefault: points on a bumpy sphere seen from a ring of inward-looking
// cameras. kRepetitive: one point pattern placed twice far apart; the true
// copy is partially observed by one camera group, the copy by two separate
// groups that together see all of it. kTextured: walls of a box room seen
// from inside, with rendered images and depth.
enum class SceneLayout { kDefault, kRepetitive, kTextured };

const char* SceneLayoutName(SceneLayout layout);
SceneLayout ParseSceneLayout(const std::string& name);

struct SceneSpec {
  SceneLayout layout = SceneLayout::kDefault;
  std::size_t num_points = 400;
  std::size_t num_db = 36;
  std::size_t num_queries = 10;
  double noise_px = 0.0;
  double distractor_fraction = 0.0;  // query descriptors swapped to another point's
  int descriptor_dim = 64;
  double descriptor_noise = 0.05;
  std::size_t codebook_k = 16;
  double soft_alpha = 0.0;  // > 0 adds a soft-assignment part named "netvlad"
  int width = 640;
  int height = 480;
  double focal = 500.0;
  bool render = false;  // images + depth (textured layout only)
  std::uint64_t seed = 0;

  static SceneSpec FromConfig(const Config& config);
};

struct SyntheticQuery {
  std::string name;
  PinholeCamera camera;
  RigidPose gt_pose;
  LocalFeatureSet features;
  std::vector<point3D_t> keypoint_points;  // true point per keypoint
  std::vector<NamedVector> global;
  std::optional<Raster> image, depth;
};

struct SyntheticScene {
  SceneSpec spec;
  std::map<point3D_t, Eigen::Vector3d> gt_points;
  SparseMap map;  // positions triangulated from the (noisy) db keypoints
  std::map<image_t, LocalFeatureSet> db_features;
  std::map<image_t, std::vector<NamedVector>> db_global;
  std::map<image_t, Raster> db_images, db_depths;
  std::vector<SyntheticQuery> queries;
  Codebook codebook;
  double diameter = 0.0;  // bounding-box diagonal of the ground-truth points
};

// Deterministic in spec.seed. Throws InfeasibleSpec.
SyntheticScene GenerateScene(const SceneSpec& spec);

// Half-extents of the textured layout's room.
inline const Eigen::Vector3d kRoomHalfExtent(5.0, 1.5, 5.0);

// Ray-cast view of the textured room: intensity in [0, 1] and z-depth.
struct RenderedView {
  Raster image;
  Raster depth;
};
RenderedView RenderRoom(const PinholeCamera& camera, const RigidPose& pose);
double RoomTexture(const Eigen::Vector3d& point);

// Camera pose at `center` looking at `target`, image y axis along `down`.
RigidPose LookAtPose(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                     const Eigen::Vector3d& down = Eigen::Vector3d(0, 1, 0));

}  // namespace locpipe

#endif  // LOCPIPE_HARNESS_SYNTHETIC_H_
