#ifndef LOCPIPE_RETRIEVAL_VLAD_H_
#define LOCPIPE_RETRIEVAL_VLAD_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "locpipe/matching/features.h"

namespace locpipe {

// Cluster centres c_k plus the soft-assignment parameters (w_k, b_k) used
// as logits w_k^T x + b_k.
struct Codebook {
  Eigen::MatrixXd centroids;  // K x D
  Eigen::MatrixXd weights;    // K x D
  Eigen::VectorXd biases;     // K
  double alpha = 1.0;

  int num_clusters() const { return static_cast<int>(centroids.rows()); }
  int dim() const { return static_cast<int>(centroids.cols()); }

  // w_k = 2 alpha c_k, b_k = -alpha |c_k|^2, which makes the soft assignment
  // equal to softmax(-alpha |x - c_k|^2).
  static Codebook FromCentroids(const Eigen::MatrixXd& centroids, double alpha);

  void Validate() const;
};

// Nearest centroid per descriptor (lowest index on ties).
std::vector<int> HardAssign(const DescriptorMatrix& descriptors, const Codebook& codebook);

// N x K softmax weights; each row sums to one.
Eigen::MatrixXd SoftAssign(const DescriptorMatrix& descriptors, const Codebook& codebook);

// V(k, :) = sum_i a_k(x_i) (x_i - c_k), no normalization.
Eigen::MatrixXd AggregateResiduals(const DescriptorMatrix& descriptors,
                                   const Codebook& codebook,
                                   const Eigen::MatrixXd& assignment);

// Per-cluster L2 normalization followed by global L2 normalization. All-zero
// rows (or an all-zero matrix) are left untouched.
void NormalizeVlad(Eigen::MatrixXd* vlad);

// K x D VLAD with hard assignment, normalized. Empty input gives the zero
// matrix. Throws DimensionMismatch.
Eigen::MatrixXd VladHard(const DescriptorMatrix& descriptors, const Codebook& codebook);
// Same aggregation with NetVLAD-style soft assignment.
Eigen::MatrixXd VladSoft(const DescriptorMatrix& descriptors, const Codebook& codebook);

// Row-major flattening into a K*D vector.
Eigen::VectorXd FlattenVlad(const Eigen::MatrixXd& vlad);

// Lloyd's k-means with k-means++ seeding, deterministic for a given seed.
Eigen::MatrixXd KMeans(const DescriptorMatrix& data, int k, int iterations,
                       std::uint64_t seed);

// "CBK1", u32 K, u32 D, f32 alpha, K x D f32 centroids, K x D f32 w, K f32 b.
Codebook LoadCodebook(const std::filesystem::path& path);
void SaveCodebook(const std::filesystem::path& path, const Codebook& codebook);

}  // namespace locpipe

#endif  // LOCPIPE_RETRIEVAL_VLAD_H_
