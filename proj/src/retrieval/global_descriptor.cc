#include "locpipe/retrieval/global_descriptor.h"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "locpipe/util/binary_io.h"
#include "locpipe/util/error.h"

namespace locpipe {

GlobalDescriptor Fuse(std::span<const NamedVector> parts, std::span<const double> weights) {
  if (parts.empty()) ThrowError(ErrorCode::kZeroVector, "no sub-descriptors to fuse");
  if (!weights.empty() && weights.size() != parts.size()) {
    ThrowError(ErrorCode::kInvalidArgument, "fusion weight count does not match parts");
  }
  double weight_sum = 0.0;
  for (std::size_t f = 0; f < parts.size(); ++f) {
    const double w = weights.empty() ? 1.0 : weights[f];
    if (!(w > 0.0)) ThrowError(ErrorCode::kInvalidArgument, "fusion weights must be positive");
    weight_sum += w;
  }
  GlobalDescriptor out;
  Eigen::Index total = 0;
  for (const NamedVector& part : parts) {
    const double norm = part.vector.norm();
    if (!part.vector.allFinite() || !(norm > 0.0)) {
      ThrowError(ErrorCode::kZeroVector, "sub-descriptor '" + part.name + "'");
    }
    out.parts.push_back({part.name, part.vector / norm});
    total += part.vector.size();
  }
  out.fused.resize(total);
  Eigen::Index offset = 0;
  for (std::size_t f = 0; f < out.parts.size(); ++f) {
    const double w = weights.empty() ? 1.0 : weights[f];
    const Eigen::VectorXd& v = out.parts[f].vector;
    out.fused.segment(offset, v.size()) = std::sqrt(w / weight_sum) * v;
    offset += v.size();
  }
  return out;
}

double FusedCosine(const GlobalDescriptor& a, const GlobalDescriptor& b) {
  if (a.fused.size() != b.fused.size()) {
    ThrowError(ErrorCode::kDimensionMismatch, "fused descriptor sizes differ");
  }
  return a.fused.dot(b.fused);
}

std::vector<NamedVector> LoadGlobalDescriptors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowError(ErrorCode::kIo, "cannot open " + path.string());
  BinaryReader reader(in, path.string());
  reader.ExpectMagic("GDS1");
  const auto count = reader.Read<std::uint32_t>();
  const auto dim = reader.Read<std::uint32_t>();
  std::vector<NamedVector> out;
  out.reserve(count);
  std::vector<float> buf(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = reader.Read<std::uint16_t>();
    std::string name(len, '\0');
    if (len > 0) reader.ReadBytes(name.data(), len);
    if (dim > 0) reader.ReadBytes(buf.data(), dim * sizeof(float));
    Eigen::VectorXd v(dim);
    for (std::uint32_t j = 0; j < dim; ++j) v[j] = buf[j];
    if (!v.allFinite()) ThrowError(ErrorCode::kNonFiniteDescriptor, path.string() + ": " + name);
    out.push_back({std::move(name), std::move(v)});
  }
  return out;
}

void SaveGlobalDescriptors(const std::filesystem::path& path,
                           std::span<const NamedVector> descriptors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  const std::uint32_t dim =
      descriptors.empty() ? 0 : static_cast<std::uint32_t>(descriptors.front().vector.size());
  out.write("GDS1", 4);
  WriteBinary(out, static_cast<std::uint32_t>(descriptors.size()));
  WriteBinary(out, dim);
  for (const NamedVector& d : descriptors) {
    if (d.vector.size() != dim) {
      ThrowError(ErrorCode::kDimensionMismatch, "descriptor '" + d.name + "' has wrong size");
    }
    if (d.name.size() > 0xffff) ThrowError(ErrorCode::kInvalidArgument, "name too long");
    WriteBinary(out, static_cast<std::uint16_t>(d.name.size()));
    out.write(d.name.data(), static_cast<std::streamsize>(d.name.size()));
    for (Eigen::Index j = 0; j < d.vector.size(); ++j) {
      WriteBinary(out, static_cast<float>(d.vector[j]));
    }
  }
}

}  // namespace locpipe
