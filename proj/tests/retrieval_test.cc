#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "locpipe/retrieval/global_descriptor.h"
#include "locpipe/retrieval/retrieval.h"
#include "locpipe/retrieval/vlad.h"
#include "locpipe/util/error.h"
#include "test_util.h"

namespace locpipe {
namespace {

DescriptorMatrix RandomMatrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> g(0, scale);
  DescriptorMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

// Independent brute-force VLAD: explicit loops, distance comparisons done
// by hand, then intra + global normalization.
Eigen::MatrixXd BruteForceVlad(const DescriptorMatrix& x, const Eigen::MatrixXd& c) {
  const int k = static_cast<int>(c.rows()), d = static_cast<int>(c.cols());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(k, d);
  for (int i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = 1e300;
    for (int kk = 0; kk < k; ++kk) {
      double dist = 0;
      for (int j = 0; j < d; ++j) dist += (x(i, j) - c(kk, j)) * (x(i, j) - c(kk, j));
      if (dist < best_d) {
        best_d = dist;
        best = kk;
      }
    }
    for (int j = 0; j < d; ++j) v(best, j) += x(i, j) - c(best, j);
  }
  if (x.rows() == 0) return v;
  for (int kk = 0; kk < k; ++kk) {
    double n = 0;
    for (int j = 0; j < d; ++j) n += v(kk, j) * v(kk, j);
    n = std::sqrt(n);
    if (n > 0)
      for (int j = 0; j < d; ++j) v(kk, j) /= n;
  }
  double total = 0;
  for (int kk = 0; kk < k; ++kk)
    for (int j = 0; j < d; ++j) total += v(kk, j) * v(kk, j);
  total = std::sqrt(total);
  if (total > 0) v /= total;
  return v;
}

TEST(VladHard, DescriptorAtCentroidHasZeroResidual) {
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, -3, 4;
  DescriptorMatrix x(1, 2);
  x << 1, 2;
  const auto v = VladHard(x, Codebook::FromCentroids(c, 1.0));
  EXPECT_TRUE(v.row(0).isZero(0.0));
  EXPECT_TRUE(v.row(1).isZero(0.0));
}

TEST(VladHard, EmptyInputIsZero) {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Ones(3, 4);
  const auto v = VladHard(DescriptorMatrix(0, 4), Codebook::FromCentroids(c, 1.0));
  EXPECT_EQ(v.rows(), 3);
  EXPECT_EQ(v.cols(), 4);
  EXPECT_TRUE(v.isZero(0.0));
}

TEST(VladHard, HandCase) {
  // c0 = (0,0), c1 = (10,0); x0=(1,1), x1=(2,-1) -> c0; x2=(9,3) -> c1.
  // Raw residual sums: (3,0) and (-1,3); intra-normalized then / sqrt(2).
  Eigen::MatrixXd c(2, 2);
  c << 0, 0, 10, 0;
  DescriptorMatrix x(3, 2);
  x << 1, 1, 2, -1, 9, 3;
  const auto v = VladHard(x, Codebook::FromCentroids(c, 1.0));
  EXPECT_NEAR(v(0, 0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(v(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(v(1, 0), -1 / std::sqrt(20.0), 1e-15);
  EXPECT_NEAR(v(1, 1), 3 / std::sqrt(20.0), 1e-15);
  EXPECT_LT((v - BruteForceVlad(x, c)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(VladHard, DimensionMismatch) {
  std::mt19937_64 rng(1);
  const Codebook cb = Codebook::FromCentroids(RandomMatrix(rng, 3, 4), 1.0);
  EXPECT_THROW(VladHard(RandomMatrix(rng, 5, 5), cb), Error);
}

TEST(VladHard, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> n(0, 200), k(1, 16), d(1, 32);
  for (int trial = 0; trial < 50; ++trial) {
    const int kk = k(rng), dd = d(rng);
    const Eigen::MatrixXd c = RandomMatrix(rng, kk, dd);
    const DescriptorMatrix x = RandomMatrix(rng, n(rng), dd);
    const auto v = VladHard(x, Codebook::FromCentroids(c, 1.0));
    EXPECT_LE((v - BruteForceVlad(x, c)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(VladSoft, SingleClusterGetsFullWeight) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd c = RandomMatrix(rng, 1, 6);
  const DescriptorMatrix x = RandomMatrix(rng, 20, 6);
  const Codebook cb = Codebook::FromCentroids(c, 0.7);
  const Eigen::MatrixXd w = SoftAssign(x, cb);
  EXPECT_TRUE(w.isOnes(0.0));
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(6);
  for (int i = 0; i < 20; ++i) sum += x.row(i) - c.row(0);
  const Eigen::MatrixXd raw = AggregateResiduals(x, cb, w);
  EXPECT_LT((raw.row(0) - sum).norm(), 1e-12);
}

TEST(VladSoft, WeightsSumToOne) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> alpha(1e-3, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    Codebook cb = Codebook::FromCentroids(RandomMatrix(rng, 8, 5), alpha(rng));
    // Arbitrary (non-distance) logits too.
    if (trial % 2) {
      cb.weights = RandomMatrix(rng, 8, 5, 10.0);
      cb.biases = Eigen::VectorXd::Random(8) * 50.0;
    }
    const Eigen::MatrixXd w = SoftAssign(RandomMatrix(rng, 30, 5, 3.0), cb);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      EXPECT_NEAR(w.row(i).sum(), 1.0, 1e-9);
      EXPECT_GE(w.row(i).minCoeff(), 0.0);
    }
  }
}

TEST(VladSoft, DistanceFormEquivalence) {
  // w = 2 alpha c, b = -alpha |c|^2 reproduces softmax(-alpha |x - c|^2).
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd c = RandomMatrix(rng, 4, 3);
  const DescriptorMatrix x = RandomMatrix(rng, 10, 3);
  const double alpha = 2.5;
  const Eigen::MatrixXd w = SoftAssign(x, Codebook::FromCentroids(c, alpha));
  for (int i = 0; i < 10; ++i) {
    double denom = 0;
    for (int k = 0; k < 4; ++k) denom += std::exp(-alpha * (x.row(i) - c.row(k)).squaredNorm());
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(w(i, k), std::exp(-alpha * (x.row(i) - c.row(k)).squaredNorm()) / denom, 1e-12);
    }
  }
}

TEST(VladSoft, ConvergesToHardAssignment) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 6, d = 8;
    // Centroids on a scaled simplex-like spread; noise 1/10 of separation.
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, d);
    for (int i = 0; i < k; ++i) c(i, i) = 1.0;
    const double sep = std::sqrt(2.0);
    std::normal_distribution<double> noise(0, sep / 10 / std::sqrt(double(d)));
    std::uniform_int_distribution<int> which(0, k - 1);
    DescriptorMatrix x(100, d);
    for (int i = 0; i < 100; ++i) {
      x.row(i) = c.row(which(rng));
      for (int j = 0; j < d; ++j) x(i, j) += noise(rng);
    }
    const Codebook cb = Codebook::FromCentroids(c, 1e4);
    EXPECT_LT((VladSoft(x, cb) - VladHard(x, cb)).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(KMeans, RecoversSeparatedClustersDeterministically) {
  std::mt19937_64 rng(7);
  Eigen::MatrixXd truth(3, 2);
  truth << 0, 0, 10, 0, 0, 10;
  DescriptorMatrix x(90, 2);
  std::normal_distribution<double> g(0, 0.1);
  for (int i = 0; i < 90; ++i) x.row(i) = truth.row(i % 3) + Eigen::RowVector2d(g(rng), g(rng));
  const Eigen::MatrixXd a = KMeans(x, 3, 50, 99);
  const Eigen::MatrixXd b = KMeans(x, 3, 50, 99);
  EXPECT_EQ(a, b);
  for (int t = 0; t < 3; ++t) {
    double best = 1e9;
    for (int c = 0; c < 3; ++c) best = std::min(best, (a.row(c) - truth.row(t)).norm());
    EXPECT_LT(best, 0.1);
  }
}

TEST(Codebook, FileRoundTrip) {
  std::mt19937_64 rng(8);
  const Codebook cb = Codebook::FromCentroids(RandomMatrix(rng, 4, 3), 3.5);
  const auto dir = testing::TempDir("codebook");
  SaveCodebook(dir / "cb.cbk", cb);
  const Codebook back = LoadCodebook(dir / "cb.cbk");
  EXPECT_EQ(back.alpha, 3.5);
  EXPECT_LT((back.centroids - cb.centroids).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((back.weights - cb.weights).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LT((back.biases - cb.biases).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Fuse, SingleDescriptorIsNormalizedInput) {
  const std::vector<NamedVector> parts = {{"netvlad", Eigen::Vector3d(3, 0, 4)}};
  const GlobalDescriptor g = Fuse(parts);
  EXPECT_LT((g.fused - Eigen::Vector3d(0.6, 0, 0.8)).norm(), 1e-15);
  EXPECT_NEAR(FusedCosine(g, g), 1.0, 1e-15);
}

TEST(Fuse, FusedCosineIsMeanOfPartCosines) {
  const std::vector<NamedVector> a = {{"x", Eigen::Vector2d(1, 0)}, {"y", Eigen::Vector3d(1, 0, 0)}};
  const std::vector<NamedVector> b = {{"x", Eigen::Vector2d(0.8, 0.6)},
                                      {"y", Eigen::Vector3d(0.4, std::sqrt(1 - 0.16), 0)}};
  EXPECT_NEAR(FusedCosine(Fuse(a), Fuse(b)), 0.6, 1e-15);
}

TEST(Fuse, RandomMeanOfCosinesAndNorm) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<NamedVector> a, b;
    double mean = 0;
    const int f = 1 + trial % 4;
    for (int i = 0; i < f; ++i) {
      Eigen::VectorXd va(8 + i), vb(8 + i);
      for (int j = 0; j < va.size(); ++j) { va[j] = g(rng); vb[j] = g(rng); }
      mean += va.normalized().dot(vb.normalized()) / f;
      a.push_back({"p" + std::to_string(i), va * 3.7});
      b.push_back({"p" + std::to_string(i), vb});
    }
    const auto fa = Fuse(a), fb = Fuse(b);
    EXPECT_NEAR(fa.fused.norm(), 1.0, 1e-6);
    EXPECT_NEAR(FusedCosine(fa, fb), mean, 1e-9);
  }
}

TEST(Fuse, ZeroVectorRejected) {
  const std::vector<NamedVector> parts = {{"z", Eigen::Vector3d::Zero()}};
  try {
    Fuse(parts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
  EXPECT_THROW(Fuse(std::span<const NamedVector>{}), Error);
}

TEST(Fuse, ArgmaxInvariantToPerPartRescaling) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> s(0.01, 100);
  auto random_parts = [&](double s0, double s1) {
    Eigen::VectorXd x(6), y(4);
    for (int j = 0; j < 6; ++j) x[j] = g(rng);
    for (int j = 0; j < 4; ++j) y[j] = g(rng);
    return std::vector<NamedVector>{{"a", x * s0}, {"b", y * s1}};
  };
  std::vector<std::vector<NamedVector>> db;
  for (int i = 0; i < 30; ++i) db.push_back(random_parts(1, 1));
  const auto query = Fuse(random_parts(1, 1));
  auto argmax = [&](double s0, double s1) {
    int best = -1;
    double best_sim = -2;
    for (int i = 0; i < 30; ++i) {
      auto parts = db[i];
      parts[0].vector *= s0;
      parts[1].vector *= s1;
      const double sim = FusedCosine(query, Fuse(parts));
      if (sim > best_sim) { best_sim = sim; best = i; }
    }
    return best;
  };
  const int reference = argmax(1, 1);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(argmax(s(rng), s(rng)), reference);
}

TEST(GlobalDescriptorFile, RoundTrip) {
  const auto dir = testing::TempDir("gds");
  const std::vector<NamedVector> in = {{"db/a.jpg", Eigen::Vector3d(1, 2, 3)},
                                       {"db/b.jpg", Eigen::Vector3d(-1, 0.5, 0)}};
  SaveGlobalDescriptors(dir / "g.gds", in);
  const auto out = LoadGlobalDescriptors(dir / "g.gds");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].name, "db/b.jpg");
  EXPECT_EQ(out[1].vector, in[1].vector);
}

GlobalDescriptor RandomGlobal(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0, 1);
  Eigen::VectorXd v(dim);
  for (int j = 0; j < dim; ++j) v[j] = g(rng);
  const std::vector<NamedVector> parts = {{"g", v}};
  return Fuse(parts);
}

TEST(Retrieve, ExactMatchRanksFirstAndClamp) {
  std::mt19937_64 rng(11);
  RetrievalIndex index;
  std::vector<GlobalDescriptor> db;
  for (image_t i = 0; i < 20; ++i) {
    db.push_back(RandomGlobal(rng, 16));
    index.Add(i + 100, db.back());
  }
  const auto hits = index.Retrieve(db[7], 5);
  ASSERT_EQ(hits.size(), 5u);
  EXPECT_EQ(hits[0].image_id, 107u);
  EXPECT_EQ(index.Retrieve(db[0], 1000).size(), 20u);
  const image_t self = 107;
  EXPECT_NE(index.Retrieve(db[7], 5, &self)[0].image_id, 107u);
}

TEST(Retrieve, EmptyIndex) {
  std::mt19937_64 rng(12);
  RetrievalIndex index;
  try {
    index.Retrieve(RandomGlobal(rng, 4), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyIndex);
  }
}

TEST(Retrieve, TiesBrokenByAscendingId) {
  RetrievalIndex index;
  const std::vector<NamedVector> p = {{"g", Eigen::Vector2d(1, 0)}};
  const auto g = Fuse(p);
  for (image_t id : {5u, 3u, 9u}) index.Add(id, g);
  const auto hits = index.Retrieve(g, 3);
  EXPECT_EQ(hits[0].image_id, 3u);
  EXPECT_EQ(hits[1].image_id, 5u);
  EXPECT_EQ(hits[2].image_id, 9u);
}

TEST(Retrieve, AgreesWithExhaustiveSort) {
  std::mt19937_64 rng(13);
  RetrievalIndex index;
  std::vector<GlobalDescriptor> db;
  for (image_t i = 0; i < 100; ++i) {
    db.push_back(RandomGlobal(rng, 32));
    index.Add(i, db.back());
  }
  for (int q = 0; q < 20; ++q) {
    const auto query = RandomGlobal(rng, 32);
    std::vector<std::pair<double, image_t>> oracle;
    for (image_t i = 0; i < 100; ++i) {
      double dot = 0;
      for (int j = 0; j < 32; ++j) dot += query.fused[j] * db[i].fused[j];
      oracle.push_back({-dot, i});
    }
    std::sort(oracle.begin(), oracle.end());
    const auto hits = index.Retrieve(query, 100);
    for (std::size_t r = 0; r < 100; ++r) EXPECT_EQ(hits[r].image_id, oracle[r].second);
  }
}

LocalFeatureSet FeaturesFromRows(const DescriptorMatrix& rows, image_t id) {
  LocalFeatureSet f;
  f.image_id = id;
  f.descriptors = rows;
  f.keypoints.resize(static_cast<std::size_t>(rows.rows()));
  f.NormalizeDescriptors();
  return f;
}

TEST(RerankByMatches, PlantedCountsOrder) {
  std::mt19937_64 rng(14);
  const DescriptorMatrix query_rows = RandomMatrix(rng, 90, 64);
  const LocalFeatureSet query = FeaturesFromRows(query_rows, 0);
  // Candidate c shares counts[c] query descriptors plus its own distractors.
  const int counts[3] = {30, 10, 50};
  std::vector<LocalFeatureSet> db;
  int offset = 0;
  for (int c = 0; c < 3; ++c) {
    DescriptorMatrix rows(counts[c] + 20, 64);
    rows.topRows(counts[c]) = query_rows.middleRows(offset, counts[c]);
    rows.bottomRows(20) = RandomMatrix(rng, 20, 64);
    offset += counts[c];
    db.push_back(FeaturesFromRows(rows, static_cast<image_t>(c + 1)));
  }
  const FeatureLookup lookup = [&](image_t id) -> const LocalFeatureSet* {
    return id >= 1 && id <= 3 ? &db[id - 1] : nullptr;
  };
  const std::vector<image_t> candidates = {1, 2, 3};
  MutualNearestNeighborMatcher matcher;
  const auto out = RerankByMatches(query, candidates, lookup, matcher, 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].image_id, 3u);
  EXPECT_EQ(out[1].image_id, 1u);
  EXPECT_EQ(out[2].image_id, 2u);
  // Random distractors may add a stray mutual match; planted ones must all survive.
  const std::size_t expected[3] = {50, 30, 10};
  for (int r = 0; r < 3; ++r) {
    EXPECT_GE(out[r].matches.size(), expected[r]);
    EXPECT_LE(out[r].matches.size(), expected[r] + 3);
  }
  EXPECT_EQ(RerankByMatches(query, candidates, lookup, matcher, 1).size(), 1u);

  const std::vector<image_t> missing = {1, 7};
  try {
    RerankByMatches(query, missing, lookup, matcher, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFeatures);
  }
}

TEST(RerankByMatches, IdenticalCandidateRanksFirstWithAllKeypoints) {
  std::mt19937_64 rng(15);
  const LocalFeatureSet query = FeaturesFromRows(RandomMatrix(rng, 25, 32), 0);
  LocalFeatureSet same = query;
  same.image_id = 2;
  const LocalFeatureSet other = FeaturesFromRows(RandomMatrix(rng, 25, 32), 1);
  const FeatureLookup lookup = [&](image_t id) -> const LocalFeatureSet* {
    return id == 1 ? &other : &same;
  };
  const std::vector<image_t> candidates = {1, 2};
  const auto out = RerankByMatches(query, candidates, lookup, MutualNearestNeighborMatcher(), 2);
  EXPECT_EQ(out[0].image_id, 2u);
  EXPECT_EQ(out[0].matches.size(), 25u);
  EXPECT_EQ(out[0].retrieval_rank, 1u);
}

}  // namespace
}  // namespace locpipe
