#include "geoprobe/metrics.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using geoprobe::AttributeSets;
using geoprobe::MetricError;

TEST(Cosine, ParallelOrthogonalAntiparallel) {
  Eigen::Vector2d a(2, 0), b(5, 0), c(1, 0), d(0, 3), e(1, 1), f(-1, -1);
  EXPECT_DOUBLE_EQ(geoprobe::cosine(a, b), 1.0);
  EXPECT_DOUBLE_EQ(geoprobe::cosine(c, d), 0.0);
  EXPECT_DOUBLE_EQ(geoprobe::cosine(e, f), -1.0);
}

TEST(Cosine, ZeroVectorIsAnError) {
  Eigen::Vector3f z = Eigen::Vector3f::Zero(), v(1, 2, 3);
  EXPECT_THROW(geoprobe::cosine(z, v), MetricError);
  EXPECT_THROW(geoprobe::cosine(v, z), MetricError);
}

TEST(Cosine, DimensionMismatch) {
  Eigen::VectorXd a(2), b(3);
  a << 1, 2;
  b << 1, 2, 3;
  EXPECT_THROW(geoprobe::cosine(a, b), MetricError);
}

TEST(Cosine, ScaleInvariantAndClamped) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int t = 0; t < 200; ++t) {
    const Eigen::MatrixXd m = oracle::random_matrix(rng, 2, 8);
    const Eigen::VectorXd u = m.row(0), v = m.row(1);
    const double base = geoprobe::cosine(u, v);
    EXPECT_NEAR(geoprobe::cosine((scale(rng) * u).eval(), (scale(rng) * v).eval()), base, 1e-12);
    EXPECT_LE(std::abs(geoprobe::cosine(u, u)), 1.0);
  }
}

TEST(Ranks, AverageTies) {
  const std::vector<double> xs = {1, 2, 2, 3};
  const auto r = geoprobe::fractional_ranks(xs);
  EXPECT_EQ(r, (std::vector<double>{1, 2.5, 2.5, 4}));
}

TEST(Spearman, MonotoneAndReversed) {
  EXPECT_DOUBLE_EQ(geoprobe::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(geoprobe::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
}

TEST(Spearman, TiedExample) {
  // Hand evaluation: x ranks (1, 2.5, 2.5, 4), y ranks (1, 2, 3, 4);
  // Sxy = 4.5, Sxx = 4.5, Syy = 5  ->  4.5 / sqrt(22.5) = 0.948683.
  const double expected = 4.5 / std::sqrt(22.5);
  const double got = geoprobe::spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 3, 4});
  EXPECT_NEAR(got, expected, 1e-12);
  EXPECT_NEAR(got, 0.9487, 1e-4);
}

TEST(Spearman, Errors) {
  EXPECT_THROW(geoprobe::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), MetricError);
  EXPECT_THROW(geoprobe::spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), MetricError);
  EXPECT_THROW(geoprobe::spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), MetricError);
}

TEST(Spearman, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> xs(20), ys(20), tx(20);
    for (int i = 0; i < 20; ++i) {
      xs[i] = u(rng);
      ys[i] = u(rng);
      tx[i] = std::exp(xs[i]) + 5.0 * xs[i];
    }
    EXPECT_EQ(geoprobe::spearman(xs, ys), geoprobe::spearman(tx, ys));
  }
}

TEST(Spearman, EqualsPearsonOnTieFreeRankVectors) {
  std::mt19937_64 rng(3);
  std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (int t = 0; t < 50; ++t) {
    auto b = a;
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_NEAR(geoprobe::spearman(a, b), geoprobe::pearson(a, b), 1e-15);
  }
}

TEST(Pearson, Examples) {
  const std::vector<double> xs = {0, 1, 2, 5};
  std::vector<double> affine, neg;
  for (double x : xs) {
    affine.push_back(2 * x + 1);
    neg.push_back(-x);
  }
  EXPECT_NEAR(geoprobe::pearson(xs, affine), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(geoprobe::pearson(xs, neg), -1.0);
  EXPECT_DOUBLE_EQ(geoprobe::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}), 0.5);
  EXPECT_THROW(geoprobe::pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), MetricError);
}

TEST(Pearson, SelfCorrelationIsExactlyOne) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 10);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> xs(3 + t % 40);
    for (auto& x : xs) x = n(rng);
    EXPECT_EQ(geoprobe::pearson(xs, xs), 1.0);
  }
}

TEST(Statistics, MatchBruteForceOnSeededPairs) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> len(3, 60);
  std::uniform_int_distribution<int> small(0, 5);
  std::normal_distribution<double> normal(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const int n = len(rng);
    std::vector<double> xs(n), ys(n);
    const bool tied = t % 2 == 0;
    for (int i = 0; i < n; ++i) {
      xs[i] = tied ? small(rng) : normal(rng);
      ys[i] = tied ? small(rng) : normal(rng);
    }
    xs[0] = -1.0;  // guarantees non-constant lists
    ys[1] = 7.0;
    EXPECT_NEAR(geoprobe::spearman(xs, ys), oracle::brute_spearman(xs, ys), 1e-10) << "trial " << t;
    EXPECT_NEAR(geoprobe::pearson(xs, ys), oracle::moment_pearson(xs, ys), 1e-10) << "trial " << t;
  }
}

namespace {

AttributeSets<double> sets_from(std::mt19937_64& rng, int na, int nb, int dim) {
  return {oracle::random_matrix(rng, na, dim), oracle::random_matrix(rng, nb, dim)};
}

}  // namespace

TEST(ScWeat, HandComputedTwoDimensionalCase) {
  // Union cosines {1, 0}: mean difference 1, sample sd sqrt(0.5).
  AttributeSets<double> attrs;
  attrs.pleasant.resize(1, 2);
  attrs.pleasant << 1, 0;
  attrs.unpleasant.resize(1, 2);
  attrs.unpleasant << 0, 1;
  const Eigen::Vector2d w(1, 0);
  EXPECT_NEAR(geoprobe::sc_weat(w, attrs).d, 1.0 / std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(geoprobe::sc_weat(w, attrs).d, 1.4142, 1e-4);
}

TEST(ScWeat, IdenticalSetsGiveZero) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const Eigen::MatrixXd a = oracle::random_matrix(rng, 5, 6);
    const Eigen::VectorXd w = oracle::random_matrix(rng, 1, 6).row(0);
    EXPECT_EQ(geoprobe::sc_weat(w, AttributeSets<double>{a, a}).d, 0.0);
  }
}

TEST(ScWeat, AntisymmetricExactly) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 300; ++t) {
    const auto attrs = sets_from(rng, 1 + t % 7, 1 + t % 5, 10);
    const Eigen::VectorXd w = oracle::random_matrix(rng, 1, 10).row(0);
    EXPECT_EQ(geoprobe::sc_weat(w, attrs).d, -geoprobe::sc_weat(w, attrs.swapped()).d);
  }
}

TEST(ScWeat, ScaleInvariance) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> scale(0.1, 50.0);
  for (int t = 0; t < 200; ++t) {
    auto attrs = sets_from(rng, 4, 4, 8);
    const Eigen::VectorXd w = oracle::random_matrix(rng, 1, 8).row(0);
    const double base = geoprobe::sc_weat(w, attrs).d;
    EXPECT_NEAR(geoprobe::sc_weat((scale(rng) * w).eval(), attrs).d, base, 1e-12);
    attrs.pleasant.row(t % 4) *= scale(rng);
    attrs.unpleasant.row((t + 1) % 4) *= scale(rng);
    EXPECT_NEAR(geoprobe::sc_weat(w, attrs).d, base, 1e-12);
  }
}

TEST(ScWeat, MatchesDefinition) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 200; ++t) {
    const auto attrs = sets_from(rng, 2 + t % 9, 2 + t % 4, 12);
    const Eigen::VectorXd w = oracle::random_matrix(rng, 1, 12).row(0);
    EXPECT_NEAR(geoprobe::sc_weat(w, attrs).d,
                oracle::brute_sc_weat(w, Eigen::MatrixXd(attrs.pleasant), Eigen::MatrixXd(attrs.unpleasant)),
                1e-12);
  }
}

TEST(ScWeat, Errors) {
  AttributeSets<double> same;
  same.pleasant.resize(1, 2);
  same.pleasant << 1, 0;
  same.unpleasant = same.pleasant;
  const Eigen::Vector2d w(1, 1);
  EXPECT_THROW(geoprobe::sc_weat(w, same), MetricError);  // zero variance

  AttributeSets<double> empty{same.pleasant, AttributeSets<double>::Matrix(0, 2)};
  EXPECT_THROW(geoprobe::sc_weat(w, empty), MetricError);

  AttributeSets<double> zero{same.pleasant, AttributeSets<double>::Matrix::Zero(1, 2)};
  EXPECT_THROW(geoprobe::sc_weat(w, zero), MetricError);
}
