#ifndef LOCPIPE_RETRIEVAL_RETRIEVAL_H_
#define LOCPIPE_RETRIEVAL_RETRIEVAL_H_

#include <functional>
#include <span>
#include <vector>

#include "locpipe/matching/matcher.h"
#include "locpipe/retrieval/global_descriptor.h"
#include "locpipe/scene/sparse_map.h"

namespace locpipe {

inline constexpr std::size_t kDefaultRetrieveCount = 50;  // M
inline constexpr std::size_t kDefaultRerankKeep = 10;     // N

struct RetrievalHit {
  image_t image_id = 0;
  double score = 0.0;
};

// Exhaustive cosine-similarity index over fused global descriptors.
// Immutable once built; concurrent Retrieve calls are safe.
class RetrievalIndex {
 public:
  void Add(image_t image_id, const GlobalDescriptor& descriptor);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::span<const image_t> ids() const { return ids_; }
  const GlobalDescriptor& Descriptor(image_t image_id) const;

  // Top-M by fused cosine, descending; ties by ascending image id. M is
  // clamped to the index size. `exclude` drops one id (self-retrieval).
  // Throws EmptyIndex, DimensionMismatch.
  std::vector<RetrievalHit> Retrieve(const GlobalDescriptor& query, std::size_t m,
                                     const image_t* exclude = nullptr) const;

 private:
  std::vector<image_t> ids_;
  std::vector<GlobalDescriptor> descriptors_;
};

struct RerankedCandidate {
  image_t image_id = 0;
  std::size_t retrieval_rank = 0;
  MatchSet matches;  // query (a) vs candidate (b)
};

using FeatureLookup = std::function<const LocalFeatureSet*(image_t)>;

// Matches the query against every candidate and keeps the N with the most
// matches (stable: ties keep retrieval order). Throws MissingFeatures.
std::vector<RerankedCandidate> RerankByMatches(const LocalFeatureSet& query,
                                               std::span<const image_t> candidates,
                                               const FeatureLookup& features,
                                               const Matcher& matcher, std::size_t n);

}  // namespace locpipe

#endif  // LOCPIPE_RETRIEVAL_RETRIEVAL_H_
