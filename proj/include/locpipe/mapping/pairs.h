#ifndef LOCPIPE_MAPPING_PAIRS_H_
#define LOCPIPE_MAPPING_PAIRS_H_

#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "locpipe/retrieval/retrieval.h"
#include "locpipe/scene/sparse_map.h"

namespace locpipe {

enum class PairSource { kPose, kCovisibility, kGlobal, kTemporal };

const char* PairSourceName(PairSource source);
PairSource ParsePairSource(const std::string& name);

struct ImagePair {
  image_t first = 0;  // first < second
  image_t second = 0;
  PairSource source = PairSource::kPose;
};

// Unordered image pairs stored as (i, j) with i < j. Re-adding an existing
// pair keeps the original tag.
class PairList {
 public:
  // Returns false for self-pairs and duplicates.
  bool Add(image_t a, image_t b, PairSource source);
  void Merge(const PairList& other);

  bool Contains(image_t a, image_t b) const;
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  // Sorted by (first, second).
  std::vector<ImagePair> Pairs() const;

 private:
  std::map<std::pair<image_t, image_t>, PairSource> pairs_;
};

// For each image, its k nearest camera centres within `radius`.
PairList PairsByPose(const SparseMap& map, std::size_t k, double radius);

// All image pairs sharing at least `min_shared` points. min_shared = 0 gives
// the complete graph over posed images.
PairList PairsByCovisibility(const SparseMap& map, std::size_t min_shared);

// Top-M retrieval from each indexed image, excluding itself.
PairList PairsByGlobal(const RetrievalIndex& index, std::size_t m);

// Each image with the `window` images before and after it in timestamp
// order. Throws MissingTimestamps.
PairList PairsBySequence(const SparseMap& map, std::size_t window);

// Text lines "name_a name_b TAG".
void WritePairs(const std::filesystem::path& path, const SparseMap& map,
                const PairList& pairs);
PairList ReadPairs(const std::filesystem::path& path, const SparseMap& map);

}  // namespace locpipe

#endif  // LOCPIPE_MAPPING_PAIRS_H_
