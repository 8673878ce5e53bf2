#include "locpipe/retrieval/vlad.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "locpipe/util/binary_io.h"
#include "locpipe/util/error.h"

namespace locpipe {
namespace {

void CheckDims(const DescriptorMatrix& descriptors, const Codebook& codebook) {
  codebook.Validate();
  if (descriptors.rows() > 0 && descriptors.cols() != codebook.dim()) {
    ThrowError(ErrorCode::kDimensionMismatch,
               "descriptor dim " + std::to_string(descriptors.cols()) + " vs codebook dim " +
                   std::to_string(codebook.dim()));
  }
}

Eigen::MatrixXf ReadFloatMatrix(BinaryReader& reader, std::uint32_t rows, std::uint32_t cols) {
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(rows, cols);
  if (m.size() > 0) reader.ReadBytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(float));
  return m;
}

void WriteFloatMatrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) WriteBinary(out, static_cast<float>(m(i, j)));
}

}  // namespace

Codebook Codebook::FromCentroids(const Eigen::MatrixXd& centroids, double alpha) {
  Codebook cb;
  cb.centroids = centroids;
  cb.alpha = alpha;
  cb.weights = 2.0 * alpha * centroids;
  cb.biases = -alpha * centroids.rowwise().squaredNorm();
  return cb;
}

void Codebook::Validate() const {
  if (centroids.rows() < 1) ThrowError(ErrorCode::kInvalidArgument, "codebook needs K >= 1");
  if (!centroids.allFinite()) ThrowError(ErrorCode::kInvalidArgument, "non-finite centroid");
  if (weights.rows() != centroids.rows() || weights.cols() != centroids.cols() ||
      biases.size() != centroids.rows()) {
    ThrowError(ErrorCode::kDimensionMismatch, "codebook parameter shapes disagree");
  }
  if (!(alpha > 0.0)) ThrowError(ErrorCode::kInvalidArgument, "alpha must be positive");
}

std::vector<int> HardAssign(const DescriptorMatrix& descriptors, const Codebook& codebook) {
  CheckDims(descriptors, codebook);
  std::vector<int> out(static_cast<std::size_t>(descriptors.rows()));
  for (Eigen::Index i = 0; i < descriptors.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k < codebook.num_clusters(); ++k) {
      const double d = (descriptors.row(i) - codebook.centroids.row(k)).squaredNorm();
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    out[static_cast<std::size_t>(i)] = best_k;
  }
  return out;
}

Eigen::MatrixXd SoftAssign(const DescriptorMatrix& descriptors, const Codebook& codebook) {
  CheckDims(descriptors, codebook);
  Eigen::MatrixXd logits = descriptors * codebook.weights.transpose();
  logits.rowwise() += codebook.biases.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double max_logit = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - max_logit).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

Eigen::MatrixXd AggregateResiduals(const DescriptorMatrix& descriptors, const Codebook& codebook,
                                   const Eigen::MatrixXd& assignment) {
  const int k = codebook.num_clusters();
  Eigen::MatrixXd vlad = Eigen::MatrixXd::Zero(k, codebook.dim());
  for (Eigen::Index i = 0; i < descriptors.rows(); ++i) {
    for (int c = 0; c < k; ++c) {
      const double a = assignment(i, c);
      if (a == 0.0) continue;
      vlad.row(c) += a * (descriptors.row(i) - codebook.centroids.row(c));
    }
  }
  return vlad;
}

void NormalizeVlad(Eigen::MatrixXd* vlad) {
  for (Eigen::Index k = 0; k < vlad->rows(); ++k) {
    const double norm = vlad->row(k).norm();
    if (norm > 0.0) vlad->row(k) /= norm;
  }
  const double total = vlad->norm();
  if (total > 0.0) *vlad /= total;
}

Eigen::MatrixXd VladHard(const DescriptorMatrix& descriptors, const Codebook& codebook) {
  const std::vector<int> nearest = HardAssign(descriptors, codebook);
  Eigen::MatrixXd assignment = Eigen::MatrixXd::Zero(descriptors.rows(), codebook.num_clusters());
  for (std::size_t i = 0; i < nearest.size(); ++i) {
    assignment(static_cast<Eigen::Index>(i), nearest[i]) = 1.0;
  }
  Eigen::MatrixXd vlad = AggregateResiduals(descriptors, codebook, assignment);
  if (descriptors.rows() > 0) NormalizeVlad(&vlad);
  return vlad;
}

Eigen::MatrixXd VladSoft(const DescriptorMatrix& descriptors, const Codebook& codebook) {
  Eigen::MatrixXd vlad =
      AggregateResiduals(descriptors, codebook, SoftAssign(descriptors, codebook));
  if (descriptors.rows() > 0) NormalizeVlad(&vlad);
  return vlad;
}

Eigen::VectorXd FlattenVlad(const Eigen::MatrixXd& vlad) {
  Eigen::VectorXd out(vlad.size());
  Eigen::Index n = 0;
  for (Eigen::Index k = 0; k < vlad.rows(); ++k)
    for (Eigen::Index j = 0; j < vlad.cols(); ++j) out[n++] = vlad(k, j);
  return out;
}

Eigen::MatrixXd KMeans(const DescriptorMatrix& data, int k, int iterations, std::uint64_t seed) {
  const Eigen::Index n = data.rows();
  if (k < 1 || n < k) {
    ThrowError(ErrorCode::kInvalidArgument,
               "k-means needs 1 <= k <= N (k=" + std::to_string(k) + ", N=" +
                   std::to_string(n) + ")");
  }
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd centers(k, data.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = data.row(first(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (data.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        r -= d2[pick];
        if (r < 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = data.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (data.row(i) - centers.row(c)).squaredNorm());
    }
  }
  const Codebook probe = Codebook::FromCentroids(centers, 1.0);
  Codebook current = probe;
  for (int it = 0; it < iterations; ++it) {
    const std::vector<int> assign = HardAssign(data, current);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, data.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += data.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    bool changed = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;  // keep empty cluster in place
      const Eigen::RowVectorXd next = sums.row(c) / counts[static_cast<std::size_t>(c)];
      if (next != current.centroids.row(c)) changed = true;
      current.centroids.row(c) = next;
    }
    current = Codebook::FromCentroids(current.centroids, 1.0);
    if (!changed) break;
  }
  return current.centroids;
}

Codebook LoadCodebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowError(ErrorCode::kIo, "cannot open " + path.string());
  BinaryReader reader(in, path.string());
  reader.ExpectMagic("CBK1");
  const auto k = reader.Read<std::uint32_t>();
  const auto d = reader.Read<std::uint32_t>();
  Codebook cb;
  cb.alpha = reader.Read<float>();
  cb.centroids = ReadFloatMatrix(reader, k, d).cast<double>();
  cb.weights = ReadFloatMatrix(reader, k, d).cast<double>();
  cb.biases = ReadFloatMatrix(reader, k, 1).cast<double>();
  cb.Validate();
  return cb;
}

void SaveCodebook(const std::filesystem::path& path, const Codebook& codebook) {
  codebook.Validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  out.write("CBK1", 4);
  WriteBinary(out, static_cast<std::uint32_t>(codebook.num_clusters()));
  WriteBinary(out, static_cast<std::uint32_t>(codebook.dim()));
  WriteBinary(out, static_cast<float>(codebook.alpha));
  WriteFloatMatrix(out, codebook.centroids);
  WriteFloatMatrix(out, codebook.weights);
  WriteFloatMatrix(out, codebook.biases);
}

}  // namespace locpipe
