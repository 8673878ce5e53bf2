#include "locpipe/matching/matcher.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locpipe/util/error.h"

namespace locpipe {
namespace {

// Content-based order so that the similarity matrix is always computed with
// the same operand order, making match(a, b) and match(b, a) bit-identical.
bool CanonicalLess(const LocalFeatureSet& a, const LocalFeatureSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  const Eigen::Index n = a.descriptors.size();
  const double* pa = a.descriptors.data();
  const double* pb = b.descriptors.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pa[i] != pb[i]) return pa[i] < pb[i];
  }
  return false;
}

struct Nearest {
  Eigen::Index best = -1;
  double best_sim = -std::numeric_limits<double>::infinity();
  double second_sim = -std::numeric_limits<double>::infinity();
};

double SimToDistance(double sim) { return std::sqrt(std::max(0.0, 2.0 - 2.0 * sim)); }

bool PassesRatio(const Nearest& n, double ratio) {
  if (n.best < 0) return false;
  if (!std::isfinite(n.second_sim)) return true;
  return SimToDistance(n.best_sim) < ratio * SimToDistance(n.second_sim);
}

void Offer(Nearest* n, Eigen::Index idx, double sim) {
  if (sim > n->best_sim) {
    n->second_sim = n->best_sim;
    n->best_sim = sim;
    n->best = idx;
  } else if (sim > n->second_sim) {
    n->second_sim = sim;
  }
}

MatchSet MatchSubsets(const LocalFeatureSet& a, const LocalFeatureSet& b,
                      std::span<const std::size_t> ia, std::span<const std::size_t> ib,
                      double ratio) {
  MatchSet out;
  if (ia.empty() || ib.empty()) return out;
  const LocalFeatureSet sa = a.Select(ia);
  const LocalFeatureSet sb = b.Select(ib);
  MatchSet sub = MatchDescriptors(sa, sb, ratio);
  for (FeatureMatch& m : sub.matches) {
    m.a = static_cast<std::uint32_t>(ia[m.a]);
    m.b = static_cast<std::uint32_t>(ib[m.b]);
  }
  std::sort(sub.matches.begin(), sub.matches.end(),
            [](const FeatureMatch& x, const FeatureMatch& y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  return sub;
}

}  // namespace

MatchSet MatchDescriptors(const LocalFeatureSet& a, const LocalFeatureSet& b, double ratio) {
  a.Validate();
  b.Validate();
  MatchSet out;
  if (a.size() == 0 || b.size() == 0) return out;
  if (a.dim() != b.dim()) {
    ThrowError(ErrorCode::kDimensionMismatch,
               "descriptor dims " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  Eigen::MatrixXd sim;
  if (CanonicalLess(b, a)) {
    sim = (b.descriptors * a.descriptors.transpose()).transpose();
  } else {
    sim = a.descriptors * b.descriptors.transpose();
  }
  const Eigen::Index na = sim.rows(), nb = sim.cols();
  std::vector<Nearest> ab(static_cast<std::size_t>(na)), ba(static_cast<std::size_t>(nb));
  for (Eigen::Index j = 0; j < nb; ++j) {
    for (Eigen::Index i = 0; i < na; ++i) {
      const double s = sim(i, j);
      Offer(&ab[static_cast<std::size_t>(i)], j, s);
      Offer(&ba[static_cast<std::size_t>(j)], i, s);
    }
  }
  for (Eigen::Index i = 0; i < na; ++i) {
    const Nearest& fwd = ab[static_cast<std::size_t>(i)];
    if (!PassesRatio(fwd, ratio)) continue;
    const Nearest& bwd = ba[static_cast<std::size_t>(fwd.best)];
    if (bwd.best != i || !PassesRatio(bwd, ratio)) continue;
    const double score = std::clamp(0.5 * (1.0 + fwd.best_sim), 0.0, 1.0);
    out.matches.push_back({static_cast<std::uint32_t>(i),
                           static_cast<std::uint32_t>(fwd.best), score});
  }
  return out;
}

MatchSet MutualNearestNeighborMatcher::Match(const LocalFeatureSet& a,
                                             const LocalFeatureSet& b) const {
  return MatchDescriptors(a, b, ratio_);
}

void PrecomputedMatcher::Add(image_t a, image_t b, MatchSet matches) {
  table_[{a, b}] = std::move(matches);
}

MatchSet PrecomputedMatcher::Match(const LocalFeatureSet& a, const LocalFeatureSet& b) const {
  auto it = table_.find({a.image_id, b.image_id});
  if (it != table_.end()) return it->second;
  auto rev = table_.find({b.image_id, a.image_id});
  if (rev != table_.end()) {
    MatchSet swapped = rev->second;
    for (FeatureMatch& m : swapped.matches) std::swap(m.a, m.b);
    std::sort(swapped.matches.begin(), swapped.matches.end(),
              [](const FeatureMatch& x, const FeatureMatch& y) {
                return std::tie(x.a, x.b) < std::tie(y.a, y.b);
              });
    return swapped;
  }
  if (fallback_ != nullptr) return fallback_->Match(a, b);
  return {};
}

std::vector<std::size_t> KeypointsWithTag(const LocalFeatureSet& features,
                                          const PyramidVariant& tag) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Keypoint& kp = features.keypoints[i];
    if (std::abs(kp.scale - tag.scale) <= 1e-6 &&
        std::abs(kp.orientation - tag.orientation) <= 1e-6) {
      out.push_back(i);
    }
  }
  return out;
}

MatchSet GuidedPyramidMatch(const LocalFeatureSet& a, const LocalFeatureSet& b,
                            const MatchSet& base, std::span<const PyramidVariant> variants,
                            PyramidMode mode, std::size_t threshold, double ratio) {
  if (base.size() >= threshold) return base;

  std::vector<MatchSet> per_variant;
  per_variant.reserve(variants.size());
  const std::vector<std::size_t> b_base = KeypointsWithTag(b, PyramidVariant{});
  for (const PyramidVariant& v : variants) {
    const std::vector<std::size_t> ia = KeypointsWithTag(a, v);
    std::vector<std::size_t> ib = KeypointsWithTag(b, v);
    if (ib.empty()) ib = b_base;
    per_variant.push_back(MatchSubsets(a, b, ia, ib, ratio));
  }

  MatchSet out;
  if (mode == PyramidMode::kMax) {
    out.variant = MatchVariant::kMax;
    std::size_t best = 0;
    for (std::size_t i = 1; i < per_variant.size(); ++i) {
      if (per_variant[i].size() > per_variant[best].size()) best = i;
    }
    if (!per_variant.empty()) out.matches = per_variant[best].matches;
    return out;
  }

  out.variant = MatchVariant::kAll;
  std::vector<FeatureMatch> pool;
  for (const MatchSet& ms : per_variant) {
    pool.insert(pool.end(), ms.matches.begin(), ms.matches.end());
  }
  std::sort(pool.begin(), pool.end(), [](const FeatureMatch& x, const FeatureMatch& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  for (const FeatureMatch& m : pool) {
    if (used_a[m.a] || used_b[m.b]) continue;
    used_a[m.a] = used_b[m.b] = true;
    out.matches.push_back(m);
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const FeatureMatch& x, const FeatureMatch& y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  return out;
}

}  // namespace locpipe
