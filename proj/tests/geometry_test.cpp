#include "geoprobe/geometry.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

using namespace geoprobe;

namespace {

EmbeddingDump random_dump(std::mt19937_64& rng, int layers, int items, int dim,
                          ledf::ItemKind kind = ledf::ItemKind::corpus_token) {
  std::vector<ledf::ItemRecord> recs(items);
  for (int i = 0; i < items; ++i) recs[i].surface = "t" + std::to_string(i);
  std::vector<LayerMatrix> mats;
  for (int l = 0; l < layers; ++l) mats.push_back(oracle::random_matrix(rng, items, dim).cast<float>());
  return ledf::make_dump("rand", kind, recs, mats);
}

}  // namespace

TEST(SelfSimilarity, IdenticalDirections) {
  LayerMatrix m(5, 2);
  m.rowwise() = Eigen::RowVector2f(3, 4);
  EXPECT_NEAR(self_similarity(m), 1.0, 1e-12);
}

TEST(SelfSimilarity, OrthogonalPair) {
  Eigen::Matrix2d m;
  m << 1, 0, 0, 1;
  EXPECT_NEAR(self_similarity(m), 0.0, 1e-15);
}

TEST(SelfSimilarity, ClosedFormMatchesDoubleLoop) {
  std::mt19937_64 rng(2024);
  const Eigen::MatrixXd m = oracle::random_matrix(rng, 200, 16);
  EXPECT_NEAR(self_similarity(m), oracle::naive_self_similarity(m), 1e-9);

  // Anisotropic: shared offset pushes rows into a cone.
  Eigen::MatrixXd cone = oracle::random_matrix(rng, 300, 24);
  cone.rowwise() += Eigen::RowVectorXd::Constant(24, 4.0);
  EXPECT_NEAR(self_similarity(cone), oracle::naive_self_similarity(cone), 1e-9);
}

TEST(SelfSimilarity, Invariances) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scale(0.01, 100);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd m = oracle::random_matrix(rng, 2 + t * 7, 5 + t);
    const double base = self_similarity(m);
    Eigen::MatrixXd scaled = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) scaled.row(i) *= scale(rng);
    EXPECT_NEAR(self_similarity(scaled), base, 1e-12);
    std::vector<Eigen::Index> perm(m.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd shuffled(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) shuffled.row(i) = m.row(perm[i]);
    EXPECT_NEAR(self_similarity(shuffled), base, 1e-12);
  }
}

TEST(SelfSimilarity, Errors) {
  Eigen::MatrixXd one(1, 3);
  one << 1, 2, 3;
  EXPECT_THROW(self_similarity(one), GeometryError);
  Eigen::MatrixXd zero_row(3, 2);
  zero_row << 1, 0, 0, 0, 0, 1;
  try {
    self_similarity(zero_row);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(Sampling, DeterministicDistinctInRange) {
  std::mt19937_64 rng(1);
  const auto dump = random_dump(rng, 1, 500, 3);
  for (std::uint64_t seed : {0ull, 42ull, 7777ull}) {
    const SampleSpec spec{100, seed, Eligibility::all_items};
    const auto a = draw_sample(dump, spec);
    EXPECT_EQ(a, draw_sample(dump, spec));
    EXPECT_EQ(a.size(), 100u);
    EXPECT_EQ(std::set<std::uint64_t>(a.begin(), a.end()).size(), 100u);
    for (auto id : a) EXPECT_LT(id, 500u);
  }
  EXPECT_NE(draw_sample(dump, {100, 1, Eligibility::all_items}),
            draw_sample(dump, {100, 2, Eligibility::all_items}));
}

TEST(Sampling, FullSampleTakesEverything) {
  std::mt19937_64 rng(1);
  const auto dump = random_dump(rng, 1, 30, 3);
  const auto ids = draw_sample(dump, {30, 5, Eligibility::all_items});
  for (std::uint64_t i = 0; i < 30; ++i) EXPECT_EQ(ids[i], i);
}

TEST(Sampling, ExcludesSpecialTokens) {
  std::mt19937_64 rng(1);
  auto dump = random_dump(rng, 1, 10, 3);
  dump.items[0].surface = "<|startoftext|>";
  dump.items[9].surface = "<|endoftext|>";
  dump.header.metadata_bytes = ledf::encode_metadata(dump.items).size();
  const auto ids = draw_sample(dump, {8, 3, Eligibility::exclude_special_tokens});
  EXPECT_EQ(ids, (std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_THROW(draw_sample(dump, {9, 3, Eligibility::exclude_special_tokens}), GeometryError);
  EXPECT_NO_THROW(draw_sample(dump, {10, 3, Eligibility::all_items}));
}

TEST(Sampling, SizeErrors) {
  std::mt19937_64 rng(1);
  const auto dump = random_dump(rng, 1, 10, 3);
  EXPECT_THROW(draw_sample(dump, {11, 1, Eligibility::all_items}), GeometryError);
  EXPECT_THROW(draw_sample(dump, {1, 1, Eligibility::all_items}), GeometryError);
}

TEST(LayerSelfSimilarity, IdenticalVectorsEveryLayer) {
  std::vector<ledf::ItemRecord> recs(12);
  for (int i = 0; i < 12; ++i) recs[i].surface = "w";
  std::vector<LayerMatrix> mats;
  for (int l = 0; l < 4; ++l) {
    LayerMatrix m(12, 3);
    m.rowwise() = Eigen::RowVector3f(1.f + l, -2.f, 0.5f);
    mats.push_back(m);
  }
  const auto dump = ledf::make_dump("same", ledf::ItemKind::corpus_token, recs, mats);
  const auto r = layer_self_similarity(dump, {6, 42, Eligibility::all_items});
  ASSERT_EQ(r.per_layer.size(), 4u);
  for (double s : r.per_layer) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(LayerSelfSimilarity, SeedDeterminismAndSharedIndices) {
  std::mt19937_64 rng(4);
  const auto dump = random_dump(rng, 5, 400, 8);
  const SampleSpec spec{50, 42, Eligibility::all_items};
  const auto a = layer_self_similarity(dump, spec);
  const auto b = layer_self_similarity(dump, spec);
  EXPECT_EQ(a.item_ids, b.item_ids);
  EXPECT_EQ(a.per_layer, b.per_layer);
  for (std::size_t l = 0; l < 5; ++l) {
    const auto rows = ledf::select_rows(dump, static_cast<std::uint32_t>(l), a.item_ids);
    EXPECT_NEAR(a.per_layer[l], oracle::naive_self_similarity(rows), 1e-9);
  }
}

TEST(LayerSelfSimilarity, StreamingMatchesInMemory) {
  std::mt19937_64 rng(5);
  const auto dump = random_dump(rng, 4, 120, 6);
  std::stringstream bytes;
  ledf::write_dump(dump, bytes);
  ledf::DumpReader reader(bytes);
  const SampleSpec spec{40, 9, Eligibility::exclude_special_tokens};
  const auto streamed = layer_self_similarity(reader, spec);
  const auto in_memory = layer_self_similarity(dump, spec);
  EXPECT_EQ(streamed.per_layer, in_memory.per_layer);
  EXPECT_EQ(streamed.item_ids, in_memory.item_ids);
}

TEST(Magnitude, Examples) {
  Eigen::Vector4f onehot(0, 0, 2.5f, 0);
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(magnitude_concentration(onehot, k), 1.0);

  Eigen::VectorXf uniform = Eigen::VectorXf::Constant(512, -0.3f);
  for (int k : {1, 5, 8, 100, 512}) EXPECT_EQ(magnitude_concentration(uniform, k), k / 512.0);

  Eigen::Vector4d v(3, -4, 1, 0);
  EXPECT_DOUBLE_EQ(magnitude_concentration(v, 2), 0.875);
}

TEST(Magnitude, MonotoneAndFullIsOne) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd v = oracle::random_matrix(rng, 1, 64).row(0);
    double prev = 0.0;
    for (int k = 1; k <= 64; ++k) {
      const double p = magnitude_concentration(v, k);
      EXPECT_GE(p, prev);
      prev = p;
    }
    EXPECT_EQ(magnitude_concentration(v, 64), 1.0);
    EXPECT_EQ(magnitude_concentration(v, 64, MagnitudeMode::l2), 1.0);
  }
}

TEST(Magnitude, L2Mode) {
  Eigen::Vector4d v(3, -4, 0, 0);
  EXPECT_DOUBLE_EQ(magnitude_concentration(v, 1, MagnitudeMode::l2), 0.8);
}

TEST(Magnitude, Errors) {
  Eigen::Vector3d z = Eigen::Vector3d::Zero(), v(1, 2, 3);
  EXPECT_THROW(magnitude_concentration(z, 1), GeometryError);
  EXPECT_THROW(magnitude_concentration(v, 0), GeometryError);
  EXPECT_THROW(magnitude_concentration(v, 4), GeometryError);
}

TEST(LayerMagnitude, OneHotDumpAndMonotoneInK) {
  std::vector<ledf::ItemRecord> recs(20);
  for (int i = 0; i < 20; ++i) recs[i].surface = "x";
  LayerMatrix onehots = LayerMatrix::Zero(20, 16);
  for (int i = 0; i < 20; ++i) onehots(i, i % 16) = 1.0f + i;
  std::mt19937_64 rng(3);
  const LayerMatrix noise = oracle::random_matrix(rng, 20, 16).cast<float>();
  const auto dump = ledf::make_dump("m", ledf::ItemKind::corpus_token, recs, {onehots, noise});
  const std::vector<int> ks = {5, 8};
  const auto r = layer_magnitude(dump, ks, {10, 42, Eligibility::all_items});
  EXPECT_EQ(r.per_layer_per_k(0, 0), 1.0);
  EXPECT_EQ(r.per_layer_per_k(0, 1), 1.0);
  EXPECT_GE(r.per_layer_per_k(1, 1), r.per_layer_per_k(1, 0));
  EXPECT_EQ(r.item_ids, draw_sample(dump, {10, 42, Eligibility::all_items}));

  std::stringstream bytes;
  ledf::write_dump(dump, bytes);
  ledf::DumpReader reader(bytes);
  const auto streamed = layer_magnitude(reader, ks, {10, 42, Eligibility::all_items});
  EXPECT_EQ(streamed.per_layer_per_k, r.per_layer_per_k);
}
