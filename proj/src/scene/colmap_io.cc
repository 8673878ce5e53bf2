#include "locpipe/scene/colmap_io.h"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "locpipe/util/error.h"
#include "locpipe/util/text.h"

namespace locpipe {
namespace {

namespace fs = std::filesystem;

struct LineCursor {
  std::ifstream file;
  std::string path;
  int line_number = 0;

  [[noreturn]] void Fail(const std::string& what) const {
    ThrowError(ErrorCode::kParseError,
               path + ":" + std::to_string(line_number) + ": " + what);
  }

  // Next non-empty, non-comment line, or false at EOF.
  bool NextDataLine(std::string* line) {
    while (std::getline(file, *line)) {
      ++line_number;
      *line = Trim(*line);
      if (line->empty() || (*line)[0] == '#') continue;
      return true;
    }
    return false;
  }

  double Double(const std::string& token, const char* field) const {
    auto v = ParseDouble(token);
    if (!v || !std::isfinite(*v)) Fail(std::string("bad ") + field + " '" + token + "'");
    return *v;
  }

  long long Int(const std::string& token, const char* field) const {
    auto v = ParseInt(token);
    if (!v) Fail(std::string("bad ") + field + " '" + token + "'");
    return *v;
  }
};

LineCursor Open(const fs::path& path) {
  LineCursor cursor;
  cursor.path = path.string();
  cursor.file.open(path);
  if (!cursor.file.is_open()) ThrowError(ErrorCode::kIo, "cannot open " + cursor.path);
  return cursor;
}

std::ofstream OpenForWrite(const fs::path& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file.is_open()) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  file.precision(17);
  return file;
}

void ReadCameras(const fs::path& path, SparseMap* map) {
  LineCursor in = Open(path);
  std::string line;
  while (in.NextDataLine(&line)) {
    const auto tokens = SplitWhitespace(line);
    if (tokens.size() < 4) in.Fail("expected CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]");
    std::vector<double> params;
    for (std::size_t i = 4; i < tokens.size(); ++i) {
      params.push_back(in.Double(tokens[i], "camera parameter"));
    }
    MapCamera camera;
    try {
      camera = ParseCameraModel(tokens[1], static_cast<int>(in.Int(tokens[2], "width")),
                                static_cast<int>(in.Int(tokens[3], "height")), params);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnsupportedCameraModel) {
        ThrowError(e.code(), in.path + ":" + std::to_string(in.line_number) +
                                 ": " + tokens[1]);
      }
      in.Fail(e.what());
    }
    camera.id = static_cast<camera_t>(in.Int(tokens[0], "camera id"));
    try {
      map->AddCamera(camera);
    } catch (const Error& e) {
      in.Fail(e.what());
    }
  }
}

void ReadImages(const fs::path& path, SparseMap* map) {
  LineCursor in = Open(path);
  std::string line;
  while (in.NextDataLine(&line)) {
    const auto tokens = SplitWhitespace(line);
    if (tokens.size() != 10) {
      in.Fail("expected IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME");
    }
    PosedImage image;
    image.id = static_cast<image_t>(in.Int(tokens[0], "image id"));
    const Eigen::Quaterniond q(in.Double(tokens[1], "qw"), in.Double(tokens[2], "qx"),
                               in.Double(tokens[3], "qy"), in.Double(tokens[4], "qz"));
    if (!(q.norm() > 1e-12)) in.Fail("degenerate quaternion");
    const Eigen::Vector3d t(in.Double(tokens[5], "tx"), in.Double(tokens[6], "ty"),
                            in.Double(tokens[7], "tz"));
    image.pose = RigidPose(q, t);
    image.camera_id = static_cast<camera_t>(in.Int(tokens[8], "camera id"));
    image.name = tokens[9];

    // POINTS2D line follows every image line, possibly empty.
    std::string points_line;
    if (!std::getline(in.file, points_line)) in.Fail("missing POINTS2D line");
    ++in.line_number;
    const auto pts = SplitWhitespace(points_line);
    if (pts.size() % 3 != 0) in.Fail("POINTS2D must be (X, Y, POINT3D_ID) triples");
    for (std::size_t i = 0; i < pts.size(); i += 3) {
      image.keypoints.emplace_back(in.Double(pts[i], "x"), in.Double(pts[i + 1], "y"));
      in.Int(pts[i + 2], "point3D id");
    }
    try {
      map->AddImage(std::move(image));
    } catch (const Error& e) {
      in.Fail(e.what());
    }
  }
}

void ReadPoints(const fs::path& path, SparseMap* map) {
  LineCursor in = Open(path);
  std::string line;
  while (in.NextDataLine(&line)) {
    const auto tokens = SplitWhitespace(line);
    if (tokens.size() < 8 || (tokens.size() - 8) % 2 != 0) {
      in.Fail("expected POINT3D_ID X Y Z R G B ERROR TRACK[]");
    }
    MapPoint point;
    point.id = static_cast<point3D_t>(in.Int(tokens[0], "point id"));
    point.position = {in.Double(tokens[1], "x"), in.Double(tokens[2], "y"),
                      in.Double(tokens[3], "z")};
    for (int c = 0; c < 3; ++c) {
      const long long v = in.Int(tokens[4 + c], "color");
      if (v < 0 || v > 255) in.Fail("color out of range");
      point.color[c] = static_cast<std::uint8_t>(v);
    }
    point.error = in.Double(tokens[7], "error");
    for (std::size_t i = 8; i < tokens.size(); i += 2) {
      TrackElement el;
      el.image_id = static_cast<image_t>(in.Int(tokens[i], "track image id"));
      el.keypoint_idx = static_cast<std::uint32_t>(in.Int(tokens[i + 1], "track keypoint"));
      const auto& images = map->Images();
      auto it = images.find(el.image_id);
      if (it == images.end()) in.Fail("track references unknown image");
      if (el.keypoint_idx >= it->second.keypoints.size()) {
        in.Fail("track keypoint index out of range");
      }
      point.track.push_back(el);
    }
    try {
      map->AddPoint(std::move(point));
    } catch (const Error& e) {
      in.Fail(e.what());
    }
  }
}

void ReadTimestamps(const fs::path& path, SparseMap* map) {
  LineCursor in = Open(path);
  std::string line;
  std::map<std::string, std::int64_t> stamps;
  while (in.NextDataLine(&line)) {
    const auto tokens = SplitWhitespace(line);
    if (tokens.size() != 2) in.Fail("expected NAME ORDINAL");
    stamps[tokens[0]] = in.Int(tokens[1], "timestamp");
  }
  // Rebuild images with timestamps attached; the map is still single-writer.
  SparseMap rebuilt;
  for (const auto& [id, camera] : map->Cameras()) rebuilt.AddCamera(camera);
  for (const auto& [id, image] : map->Images()) {
    PosedImage copy = image;
    copy.observed_points.clear();
    auto it = stamps.find(image.name);
    if (it != stamps.end()) copy.timestamp = it->second;
    rebuilt.AddImage(std::move(copy));
  }
  for (const auto& [id, point] : map->Points()) rebuilt.AddPoint(point);
  *map = std::move(rebuilt);
}

}  // namespace

MapCamera ParseCameraModel(const std::string& model_name, int width, int height,
                           const std::vector<double>& params) {
  MapCamera camera;
  PinholeCamera& k = camera.intrinsics;
  k.width = width;
  k.height = height;
  auto expect = [&](std::size_t n) {
    if (params.size() != n) {
      ThrowError(ErrorCode::kParseError, model_name + " expects " +
                                             std::to_string(n) + " parameters, got " +
                                             std::to_string(params.size()));
    }
  };
  if (model_name == "SIMPLE_PINHOLE") {
    expect(3);
    camera.model = CameraModel::kSimplePinhole;
    k.fx = k.fy = params[0];
    k.cx = params[1];
    k.cy = params[2];
  } else if (model_name == "PINHOLE") {
    expect(4);
    camera.model = CameraModel::kPinhole;
    k.fx = params[0];
    k.fy = params[1];
    k.cx = params[2];
    k.cy = params[3];
  } else if (model_name == "SIMPLE_RADIAL") {
    expect(4);
    camera.model = CameraModel::kSimpleRadial;
    k.fx = k.fy = params[0];
    k.cx = params[1];
    k.cy = params[2];
    k.distortion[0] = params[3];
  } else if (model_name == "RADIAL") {
    expect(5);
    camera.model = CameraModel::kRadial;
    k.fx = k.fy = params[0];
    k.cx = params[1];
    k.cy = params[2];
    k.distortion[0] = params[3];
    k.distortion[1] = params[4];
  } else if (model_name == "OPENCV") {
    expect(8);
    camera.model = CameraModel::kOpenCV;
    k.fx = params[0];
    k.fy = params[1];
    k.cx = params[2];
    k.cy = params[3];
    k.distortion = Eigen::Vector4d(params[4], params[5], params[6], params[7]);
  } else {
    ThrowError(ErrorCode::kUnsupportedCameraModel, model_name);
  }
  return camera;
}

std::vector<double> CameraModelParams(const MapCamera& camera) {
  const PinholeCamera& k = camera.intrinsics;
  switch (camera.model) {
    case CameraModel::kSimplePinhole: return {k.fx, k.cx, k.cy};
    case CameraModel::kPinhole: return {k.fx, k.fy, k.cx, k.cy};
    case CameraModel::kSimpleRadial: return {k.fx, k.cx, k.cy, k.distortion[0]};
    case CameraModel::kRadial:
      return {k.fx, k.cx, k.cy, k.distortion[0], k.distortion[1]};
    case CameraModel::kOpenCV:
      return {k.fx, k.fy, k.cx, k.cy, k.distortion[0], k.distortion[1],
              k.distortion[2], k.distortion[3]};
  }
  return {};
}

SparseMap LoadColmapText(const fs::path& dir) {
  SparseMap map;
  ReadCameras(dir / "cameras.txt", &map);
  ReadImages(dir / "images.txt", &map);
  ReadPoints(dir / "points3D.txt", &map);
  if (fs::exists(dir / "timestamps.txt")) ReadTimestamps(dir / "timestamps.txt", &map);
  return map;
}

void SaveColmapText(const SparseMap& map, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream file = OpenForWrite(dir / "cameras.txt");
    file << "# Camera list with one line of data per camera:\n";
    file << "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n";
    file << "# Number of cameras: " << map.Cameras().size() << "\n";
    for (const auto& [id, camera] : map.Cameras()) {
      file << id << " " << CameraModelName(camera.model) << " "
           << camera.intrinsics.width << " " << camera.intrinsics.height;
      for (double p : CameraModelParams(camera)) file << " " << p;
      file << "\n";
    }
  }
  {
    std::ofstream file = OpenForWrite(dir / "images.txt");
    file << "# Image list with two lines of data per image:\n";
    file << "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n";
    file << "#   POINTS2D[] as (X, Y, POINT3D_ID)\n";
    file << "# Number of images: " << map.Images().size() << "\n";
    for (const auto& [id, image] : map.Images()) {
      const Eigen::Quaterniond& q = image.pose.rotation();
      const Eigen::Vector3d& t = image.pose.translation();
      file << id << " " << q.w() << " " << q.x() << " " << q.y() << " " << q.z()
           << " " << t.x() << " " << t.y() << " " << t.z() << " "
           << image.camera_id << " " << image.name << "\n";
      std::ostringstream line;
      line.precision(17);
      for (std::size_t k = 0; k < image.keypoints.size(); ++k) {
        if (k > 0) line << " ";
        line << image.keypoints[k].x() << " " << image.keypoints[k].y() << " ";
        auto obs = image.observed_points.find(static_cast<std::uint32_t>(k));
        if (obs == image.observed_points.end()) {
          line << -1;
        } else {
          line << obs->second;
        }
      }
      file << line.str() << "\n";
    }
  }
  {
    std::ofstream file = OpenForWrite(dir / "points3D.txt");
    file << "# 3D point list with one line of data per point:\n";
    file << "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n";
    file << "# Number of points: " << map.Points().size() << "\n";
    for (const auto& [id, point] : map.Points()) {
      file << id << " " << point.position.x() << " " << point.position.y() << " "
           << point.position.z() << " " << static_cast<int>(point.color[0]) << " "
           << static_cast<int>(point.color[1]) << " "
           << static_cast<int>(point.color[2]) << " " << point.error;
      for (const TrackElement& el : point.track) {
        file << " " << el.image_id << " " << el.keypoint_idx;
      }
      file << "\n";
    }
  }
  bool any_timestamp = false;
  for (const auto& [id, image] : map.Images()) any_timestamp |= image.timestamp.has_value();
  if (any_timestamp) {
    std::ofstream file = OpenForWrite(dir / "timestamps.txt");
    for (const auto& [id, image] : map.Images()) {
      if (image.timestamp) file << image.name << " " << *image.timestamp << "\n";
    }
  } else if (fs::exists(dir / "timestamps.txt")) {
    fs::remove(dir / "timestamps.txt");
  }
}

std::string FormatPoseLine(const NamedPose& pose) {
  std::ostringstream line;
  line.precision(17);
  const Eigen::Quaterniond& q = pose.pose.rotation();
  const Eigen::Vector3d& t = pose.pose.translation();
  line << pose.name << " " << q.w() << " " << q.x() << " " << q.y() << " " << q.z()
       << " " << t.x() << " " << t.y() << " " << t.z();
  return line.str();
}

void WritePoses(const fs::path& path, const std::vector<NamedPose>& poses) {
  std::ofstream file = OpenForWrite(path);
  for (const NamedPose& pose : poses) file << FormatPoseLine(pose) << "\n";
}

std::vector<NamedPose> ReadPoses(const fs::path& path) {
  LineCursor in = Open(path);
  std::vector<NamedPose> poses;
  std::string line;
  while (in.NextDataLine(&line)) {
    const auto tokens = SplitWhitespace(line);
    if (tokens.size() != 8) in.Fail("expected name qw qx qy qz tx ty tz");
    const Eigen::Quaterniond q(in.Double(tokens[1], "qw"), in.Double(tokens[2], "qx"),
                               in.Double(tokens[3], "qy"), in.Double(tokens[4], "qz"));
    if (!(q.norm() > 1e-12)) in.Fail("degenerate quaternion");
    poses.push_back({tokens[0],
                     RigidPose(q, {in.Double(tokens[5], "tx"), in.Double(tokens[6], "ty"),
                                   in.Double(tokens[7], "tz")})});
  }
  return poses;
}

}  // namespace locpipe
