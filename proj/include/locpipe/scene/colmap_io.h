#ifndef LOCPIPE_SCENE_COLMAP_IO_H_
#define LOCPIPE_SCENE_COLMAP_IO_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "locpipe/scene/sparse_map.h"

namespace locpipe {

// Reads cameras.txt, images.txt and points3D.txt (COLMAP text model) plus
// the optional timestamps.txt sidecar ("NAME ORDINAL" per line).
// Errors: Io, ParseError (message carries file:line), UnsupportedCameraModel.
SparseMap LoadColmapText(const std::filesystem::path& dir);

// Writes the three model files with 17 significant digits, creating `dir`
// if needed. Timestamps, when any image has one, go to timestamps.txt.
void SaveColmapText(const SparseMap& map, const std::filesystem::path& dir);

// Parses a COLMAP camera model name and parameter list into intrinsics.
MapCamera ParseCameraModel(const std::string& model_name, int width,
                           int height, const std::vector<double>& params);
std::vector<double> CameraModelParams(const MapCamera& camera);

struct NamedPose {
  std::string name;
  RigidPose pose;
};

// Submission line format: "name qw qx qy qz tx ty tz".
void WritePoses(const std::filesystem::path& path,
                const std::vector<NamedPose>& poses);
std::vector<NamedPose> ReadPoses(const std::filesystem::path& path);
std::string FormatPoseLine(const NamedPose& pose);

}  // namespace locpipe

#endif  // LOCPIPE_SCENE_COLMAP_IO_H_
