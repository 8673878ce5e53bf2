#ifndef LOCPIPE_MATCHING_MATCHER_H_
#define LOCPIPE_MATCHING_MATCHER_H_

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "locpipe/matching/features.h"

namespace locpipe {

enum class MatchVariant { kBase, kAll, kMax };

struct FeatureMatch {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double score = 0.0;  // in [0, 1]

  bool operator==(const FeatureMatch&) const = default;
};

// One-to-one correspondences between two feature sets.
struct MatchSet {
  std::vector<FeatureMatch> matches;
  MatchVariant variant = MatchVariant::kBase;

  std::size_t size() const { return matches.size(); }
};

inline constexpr double kDefaultRatio = 0.85;
inline constexpr std::size_t kDefaultPyramidThreshold = 100;

// Mutual nearest neighbours in cosine similarity that also pass the ratio
// test in both directions. Output sorted by index in `a`. Mirroring the
// arguments yields exactly the swapped pairs. Throws DimensionMismatch.
MatchSet MatchDescriptors(const LocalFeatureSet& a, const LocalFeatureSet& b,
                          double ratio = kDefaultRatio);

// Interchangeable pairwise matcher.
class Matcher {
 public:
  virtual ~Matcher() = default;
  virtual MatchSet Match(const LocalFeatureSet& a, const LocalFeatureSet& b) const = 0;
};

class MutualNearestNeighborMatcher : public Matcher {
 public:
  explicit MutualNearestNeighborMatcher(double ratio = kDefaultRatio) : ratio_(ratio) {}
  MatchSet Match(const LocalFeatureSet& a, const LocalFeatureSet& b) const override;

 private:
  double ratio_;
};

// Serves matches computed upstream (e.g. by a learned matcher), keyed by the
// (a.image_id, b.image_id) pair; unknown pairs fall back to `fallback`.
class PrecomputedMatcher : public Matcher {
 public:
  explicit PrecomputedMatcher(const Matcher* fallback = nullptr) : fallback_(fallback) {}
  void Add(image_t a, image_t b, MatchSet matches);
  MatchSet Match(const LocalFeatureSet& a, const LocalFeatureSet& b) const override;

 private:
  std::map<std::pair<image_t, image_t>, MatchSet> table_;
  const Matcher* fallback_;
};

struct PyramidVariant {
  double scale = 1.0;
  double orientation = 0.0;
};

enum class PyramidMode { kAll, kMax };

// Indices of keypoints carrying the given pyramid tag (1e-6 tolerance).
std::vector<std::size_t> KeypointsWithTag(const LocalFeatureSet& features,
                                          const PyramidVariant& tag);

// Fallback for weakly matched pairs. When `base` has at least `threshold`
// matches it is returned unchanged. Otherwise each variant is matched:
// keypoints of `a` tagged with the variant against keypoints of `b` with the
// same tag (or `b`'s untransformed keypoints, scale 1 / orientation 0, when
// `b` carries no such tag). kAll unions the variant matches, resolving index
// conflicts by higher score then lower (a, b); kMax keeps the variant with
// the most matches (first on ties). Indices refer to the full sets.
MatchSet GuidedPyramidMatch(const LocalFeatureSet& a, const LocalFeatureSet& b,
                            const MatchSet& base, std::span<const PyramidVariant> variants,
                            PyramidMode mode,
                            std::size_t threshold = kDefaultPyramidThreshold,
                            double ratio = kDefaultRatio);

}  // namespace locpipe

#endif  // LOCPIPE_MATCHING_MATCHER_H_
