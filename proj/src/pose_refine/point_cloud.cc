#include "locpipe/pose_refine/point_cloud.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "locpipe/util/binary_io.h"
#include "locpipe/util/error.h"
#include "locpipe/util/pgm.h"

namespace locpipe {
namespace {

constexpr std::size_t kLeafSize = 8;
constexpr char kDepthMagic[4] = {'D', 'P', 'T', '1'};

}  // namespace

double PointCloud::Diameter() const {
  if (points.empty()) return 0.0;
  Eigen::Vector3d lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

PointCloud BackprojectDepth(const PinholeCamera& camera, const Raster& depth, int stride) {
  if (stride < 1) ThrowError(ErrorCode::kInvalidArgument, "stride must be >= 1");
  if (depth.cols() != camera.width || depth.rows() != camera.height) {
    ThrowError(ErrorCode::kInvalidArgument, "depth raster does not match camera size");
  }
  PointCloud out;
  for (Eigen::Index y = 0; y < depth.rows(); y += stride) {
    for (Eigen::Index x = 0; x < depth.cols(); x += stride) {
      const double d = depth(y, x);
      if (d < 0) ThrowError(ErrorCode::kInvalidArgument, "negative depth");
      if (!(d > 0) || !std::isfinite(d)) continue;
      out.points.emplace_back((x - camera.cx) / camera.fx * d, (y - camera.cy) / camera.fy * d, d);
    }
  }
  if (out.empty()) ThrowError(ErrorCode::kAllInvalid, "depth map has no valid pixel");
  return out;
}

PointCloud MapPointCloud(const SparseMap& map) {
  PointCloud out;
  out.points.reserve(map.Points().size());
  for (const auto& [id, point] : map.Points()) out.points.push_back(point.position);
  return out;
}

Raster LoadDepth(const std::filesystem::path& path, double pgm_scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowError(ErrorCode::kIo, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::equal(magic, magic + 4, kDepthMagic)) {
    BinaryReader reader(in, path);
    const auto w = reader.Read<std::uint32_t>();
    const auto h = reader.Read<std::uint32_t>();
    if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
      ThrowError(ErrorCode::kParseError, path.string() + ": bad depth size");
    }
    Raster out(h, w);
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = reader.Read<float>();
    return out;
  }
  in.close();
  return ToRaster(ReadPgm(path), pgm_scale);
}

void SaveDepthDpt(const std::filesystem::path& path, const Raster& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kDepthMagic, 4);
  WriteBinary(out, static_cast<std::uint32_t>(depth.cols()));
  WriteBinary(out, static_cast<std::uint32_t>(depth.rows()));
  for (Eigen::Index i = 0; i < depth.size(); ++i) {
    WriteBinary(out, static_cast<float>(depth.data()[i]));
  }
}

KdTree::KdTree(std::vector<Eigen::Vector3d> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!points_.empty()) Build(0, points_.size());
}

std::size_t KdTree::Build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({});
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  Eigen::Vector3d lo = points_[order_[begin]], hi = lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const std::size_t left = Build(begin, mid);
  const std::size_t right = Build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::Search(std::size_t node, const Eigen::Vector3d& q, std::size_t& best,
                    double& best_d2) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const double d2 = (points_[order_[i]] - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && order_[i] < best)) {
        best_d2 = d2;
        best = order_[i];
      }
    }
    return;
  }
  const double diff = q[n.axis] - n.split;
  const std::size_t near = diff < 0 ? n.left : n.right;
  const std::size_t far = diff < 0 ? n.right : n.left;
  Search(near, q, best, best_d2);
  if (diff * diff <= best_d2) Search(far, q, best, best_d2);
}

std::pair<std::size_t, double> KdTree::Nearest(const Eigen::Vector3d& query) const {
  if (points_.empty()) ThrowError(ErrorCode::kInvalidArgument, "nearest neighbour on empty tree");
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d2 = std::numeric_limits<double>::infinity();
  Search(0, query, best, best_d2);
  return {best, best_d2};
}

}  // namespace locpipe
