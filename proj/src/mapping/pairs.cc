#include "locpipe/mapping/pairs.h"

#include <algorithm>
#include <fstream>
#include <string>

#include "locpipe/util/error.h"
#include "locpipe/util/text.h"

namespace locpipe {

const char* PairSourceName(PairSource source) {
  switch (source) {
    case PairSource::kPose:
      return "POSE";
    case PairSource::kCovisibility:
      return "COVIS";
    case PairSource::kGlobal:
      return "GLOBAL";
    case PairSource::kTemporal:
      return "TEMPORAL";
  }
  return "?";
}

PairSource ParsePairSource(const std::string& name) {
  for (PairSource s : {PairSource::kPose, PairSource::kCovisibility,
                       PairSource::kGlobal, PairSource::kTemporal}) {
    if (name == PairSourceName(s)) return s;
  }
  ThrowError(ErrorCode::kParseError, "unknown pair source '" + name + "'");
}

bool PairList::Add(image_t a, image_t b, PairSource source) {
  if (a == b) return false;
  if (a > b) std::swap(a, b);
  return pairs_.emplace(std::make_pair(a, b), source).second;
}

void PairList::Merge(const PairList& other) {
  for (const auto& [key, source] : other.pairs_) pairs_.emplace(key, source);
}

bool PairList::Contains(image_t a, image_t b) const {
  if (a > b) std::swap(a, b);
  return pairs_.count({a, b}) > 0;
}

std::vector<ImagePair> PairList::Pairs() const {
  std::vector<ImagePair> out;
  out.reserve(pairs_.size());
  for (const auto& [key, source] : pairs_) out.push_back({key.first, key.second, source});
  return out;
}

PairList PairsByPose(const SparseMap& map, std::size_t k, double radius) {
  PairList out;
  if (k == 0 || !(radius > 0)) return out;
  std::vector<std::pair<image_t, Eigen::Vector3d>> centers;
  for (const auto& [id, image] : map.Images()) centers.emplace_back(id, image.pose.Center());

  std::vector<std::pair<double, image_t>> near;
  for (const auto& [id, center] : centers) {
    near.clear();
    for (const auto& [other, other_center] : centers) {
      if (other == id) continue;
      const double d = (center - other_center).norm();
      if (d <= radius) near.emplace_back(d, other);
    }
    const std::size_t keep = std::min(k, near.size());
    std::partial_sort(near.begin(), near.begin() + keep, near.end());
    for (std::size_t i = 0; i < keep; ++i) out.Add(id, near[i].second, PairSource::kPose);
  }
  return out;
}

PairList PairsByCovisibility(const SparseMap& map, std::size_t min_shared) {
  PairList out;
  if (min_shared == 0) {
    for (auto a = map.Images().begin(); a != map.Images().end(); ++a) {
      for (auto b = std::next(a); b != map.Images().end(); ++b) {
        out.Add(a->first, b->first, PairSource::kCovisibility);
      }
    }
    return out;
  }
  for (const auto& [key, count] : map.CovisibilityGraph()) {
    if (count >= min_shared) out.Add(key.first, key.second, PairSource::kCovisibility);
  }
  return out;
}

PairList PairsByGlobal(const RetrievalIndex& index, std::size_t m) {
  PairList out;
  if (index.empty()) ThrowError(ErrorCode::kEmptyIndex, "global pair retrieval on empty index");
  for (image_t id : index.ids()) {
    for (const RetrievalHit& hit : index.Retrieve(index.Descriptor(id), m, &id)) {
      out.Add(id, hit.image_id, PairSource::kGlobal);
    }
  }
  return out;
}

PairList PairsBySequence(const SparseMap& map, std::size_t window) {
  std::vector<std::pair<std::int64_t, image_t>> order;
  for (const auto& [id, image] : map.Images()) {
    if (!image.timestamp) {
      ThrowError(ErrorCode::kMissingTimestamps, "image '" + image.name + "' has no timestamp");
    }
    order.emplace_back(*image.timestamp, id);
  }
  std::sort(order.begin(), order.end());
  PairList out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size() && j - i <= window; ++j) {
      out.Add(order[i].second, order[j].second, PairSource::kTemporal);
    }
  }
  return out;
}

void WritePairs(const std::filesystem::path& path, const SparseMap& map,
                const PairList& pairs) {
  std::ofstream out(path);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  for (const ImagePair& p : pairs.Pairs()) {
    out << map.Image(p.first).name << ' ' << map.Image(p.second).name << ' '
        << PairSourceName(p.source) << '\n';
  }
}

PairList ReadPairs(const std::filesystem::path& path, const SparseMap& map) {
  std::ifstream in(path);
  if (!in) ThrowError(ErrorCode::kIo, "cannot open " + path.string());
  PairList out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = SplitWhitespace(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != 3) ThrowError(ErrorCode::kParseError, where + "expected 3 fields");
    const auto a = map.FindImageByName(fields[0]);
    const auto b = map.FindImageByName(fields[1]);
    if (!a || !b) ThrowError(ErrorCode::kUnknownImage, where + "unknown image name");
    out.Add(*a, *b, ParsePairSource(fields[2]));
  }
  return out;
}

}  // namespace locpipe
