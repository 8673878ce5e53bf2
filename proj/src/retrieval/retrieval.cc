#include "locpipe/retrieval/retrieval.h"

#include <algorithm>
#include <numeric>

#include "locpipe/util/error.h"

namespace locpipe {

void RetrievalIndex::Add(image_t image_id, const GlobalDescriptor& descriptor) {
  if (!descriptors_.empty() && descriptor.fused.size() != descriptors_.front().fused.size()) {
    ThrowError(ErrorCode::kDimensionMismatch,
               "global descriptor of image " + std::to_string(image_id) + " has size " +
                   std::to_string(descriptor.fused.size()));
  }
  ids_.push_back(image_id);
  descriptors_.push_back(descriptor);
}

const GlobalDescriptor& RetrievalIndex::Descriptor(image_t image_id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == image_id) return descriptors_[i];
  }
  ThrowError(ErrorCode::kUnknownImage, std::to_string(image_id));
}

std::vector<RetrievalHit> RetrievalIndex::Retrieve(const GlobalDescriptor& query, std::size_t m,
                                                   const image_t* exclude) const {
  if (ids_.empty()) ThrowError(ErrorCode::kEmptyIndex, "retrieval index is empty");
  std::vector<RetrievalHit> hits;
  hits.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (exclude != nullptr && ids_[i] == *exclude) continue;
    hits.push_back({ids_[i], FusedCosine(query, descriptors_[i])});
  }
  const auto order = [](const RetrievalHit& x, const RetrievalHit& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.image_id < y.image_id;
  };
  const std::size_t keep = std::min(m, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    order);
  hits.resize(keep);
  return hits;
}

std::vector<RerankedCandidate> RerankByMatches(const LocalFeatureSet& query,
                                               std::span<const image_t> candidates,
                                               const FeatureLookup& features,
                                               const Matcher& matcher, std::size_t n) {
  std::vector<RerankedCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t rank = 0; rank < candidates.size(); ++rank) {
    const LocalFeatureSet* db = features(candidates[rank]);
    if (db == nullptr) {
      ThrowError(ErrorCode::kMissingFeatures, std::to_string(candidates[rank]));
    }
    out.push_back({candidates[rank], rank, matcher.Match(query, *db)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RerankedCandidate& x, const RerankedCandidate& y) {
                     return x.matches.size() > y.matches.size();
                   });
  if (out.size() > n) out.resize(n);
  return out;
}

}  // namespace locpipe
