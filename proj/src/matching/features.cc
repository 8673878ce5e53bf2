#include "locpipe/matching/features.h"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "locpipe/util/binary_io.h"
#include "locpipe/util/error.h"

namespace locpipe {

void LocalFeatureSet::Validate() const {
  if (static_cast<std::size_t>(descriptors.rows()) != keypoints.size()) {
    ThrowError(ErrorCode::kDimensionMismatch,
               std::to_string(keypoints.size()) + " keypoints vs " +
                   std::to_string(descriptors.rows()) + " descriptor rows");
  }
  if (!descriptors.allFinite()) {
    ThrowError(ErrorCode::kNonFiniteDescriptor, "image " + std::to_string(image_id));
  }
}

void LocalFeatureSet::NormalizeDescriptors() {
  for (Eigen::Index i = 0; i < descriptors.rows(); ++i) {
    const double norm = descriptors.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      ThrowError(ErrorCode::kNonFiniteDescriptor,
                 "descriptor row " + std::to_string(i) + " cannot be normalized");
    }
    descriptors.row(i) /= norm;
  }
}

LocalFeatureSet LocalFeatureSet::Select(std::span<const std::size_t> indices) const {
  LocalFeatureSet out;
  out.image_id = image_id;
  out.descriptors.resize(static_cast<Eigen::Index>(indices.size()), descriptors.cols());
  out.keypoints.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.keypoints.push_back(keypoints.at(indices[r]));
    out.descriptors.row(static_cast<Eigen::Index>(r)) =
        descriptors.row(static_cast<Eigen::Index>(indices[r]));
  }
  return out;
}

LocalFeatureSet LoadFeatures(const std::filesystem::path& path, image_t image_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowError(ErrorCode::kIo, "cannot open " + path.string());
  BinaryReader reader(in, path.string());
  reader.ExpectMagic("LFS1");
  const auto n = reader.Read<std::uint32_t>();
  const auto d = reader.Read<std::uint32_t>();
  LocalFeatureSet features;
  features.image_id = image_id;
  features.keypoints.resize(n);
  for (auto& kp : features.keypoints) {
    float rec[4];
    reader.ReadBytes(rec, sizeof(rec));
    kp = {rec[0], rec[1], rec[2], rec[3]};
  }
  std::vector<float> desc(static_cast<std::size_t>(n) * d);
  if (!desc.empty()) reader.ReadBytes(desc.data(), desc.size() * sizeof(float));
  features.descriptors =
      Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          desc.data(), n, d)
          .cast<double>();
  features.Validate();
  features.NormalizeDescriptors();
  return features;
}

void SaveFeatures(const std::filesystem::path& path, const LocalFeatureSet& features) {
  features.Validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  out.write("LFS1", 4);
  WriteBinary(out, static_cast<std::uint32_t>(features.size()));
  WriteBinary(out, static_cast<std::uint32_t>(features.dim()));
  for (const Keypoint& kp : features.keypoints) {
    const float rec[4] = {static_cast<float>(kp.x), static_cast<float>(kp.y),
                          static_cast<float>(kp.scale), static_cast<float>(kp.orientation)};
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
  for (Eigen::Index i = 0; i < features.descriptors.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.descriptors.cols(); ++j) {
      WriteBinary(out, static_cast<float>(features.descriptors(i, j)));
    }
  }
}

}  // namespace locpipe
