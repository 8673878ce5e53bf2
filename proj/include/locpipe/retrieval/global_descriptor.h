#ifndef LOCPIPE_RETRIEVAL_GLOBAL_DESCRIPTOR_H_
#define LOCPIPE_RETRIEVAL_GLOBAL_DESCRIPTOR_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace locpipe {

struct NamedVector {
  std::string name;
  Eigen::VectorXd vector;
};

// A fusion of F named sub-descriptors. Each part is unit-norm; the fused
// vector concatenates part f scaled by sqrt(w_f / sum w), so the fused cosine
// is the weighted mean of per-part cosines (plain mean for uniform weights).
struct GlobalDescriptor {
  std::vector<NamedVector> parts;
  Eigen::VectorXd fused;
};

// Throws ZeroVector for empty input, zero or non-finite parts, and
// InvalidArgument for a weight list of the wrong size or nonpositive weights.
GlobalDescriptor Fuse(std::span<const NamedVector> parts,
                      std::span<const double> weights = {});

double FusedCosine(const GlobalDescriptor& a, const GlobalDescriptor& b);

// "GDS1", u32 count, u32 dim, then per image: u16 name length, name bytes,
// dim x f32.
std::vector<NamedVector> LoadGlobalDescriptors(const std::filesystem::path& path);
void SaveGlobalDescriptors(const std::filesystem::path& path,
                           std::span<const NamedVector> descriptors);

}  // namespace locpipe

#endif  // LOCPIPE_RETRIEVAL_GLOBAL_DESCRIPTOR_H_
