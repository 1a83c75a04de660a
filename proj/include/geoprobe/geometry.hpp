// Geometric probes over layerwise embeddings: intra-layer self-similarity
// (mean pairwise cosine over ordered pairs of distinct rows) and the share of
// a vector's magnitude carried by its k largest-magnitude components.
#ifndef GEOPROBE_GEOMETRY_HPP
#define GEOPROBE_GEOMETRY_HPP

#include "geoprobe/ledf.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geoprobe {

class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Eligibility { all_items, exclude_special_tokens };
enum class MagnitudeMode { l1, l2 };

struct SampleSpec {
  std::size_t sample_size = 10000;
  std::uint64_t seed = 42;
  Eligibility eligibility = Eligibility::exclude_special_tokens;
};

struct SelfSimilarityResult {
  std::vector<double> per_layer;
  SampleSpec spec;
  std::vector<std::uint64_t> item_ids;  // identical for every layer
};

struct MagnitudeResult {
  std::vector<int> ks;
  Eigen::MatrixXd per_layer_per_k;  // layer_count x ks.size()
  SampleSpec spec;
  std::vector<std::uint64_t> item_ids;
};

/// Mean cosine over all ordered pairs i != j, via the closed form
///   s = (|sum_i u_i|^2 - sum_i |u_i|^2) / (n^2 - n)
/// with u_i the unit-normalized rows. O(n d) time, O(d) extra memory.
template <typename Derived>
double self_similarity(const Eigen::MatrixBase<Derived>& rows) {
  const Eigen::Index n = rows.rows();
  if (n < 2) throw GeometryError("self_similarity: need at least 2 rows");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rows.cols());
  double diagonal = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd r = rows.row(i).template cast<double>();
    const double norm = r.norm();
    if (norm == 0.0) throw GeometryError("self_similarity: row " + std::to_string(i) + " is zero");
    const Eigen::RowVectorXd u = r / norm;
    sum += u.transpose();
    diagonal += u.squaredNorm();
  }
  const double nn = static_cast<double>(n);
  const double s = (sum.squaredNorm() - diagonal) / (nn * nn - nn);
  return std::clamp(s, -1.0, 1.0);
}

/// Proportion of |v| held by its k largest-magnitude entries, for each k in
/// `ks`. L1 mode sums absolute values; L2 mode compares Euclidean lengths.
template <typename Derived>
std::vector<double> magnitude_profile(const Eigen::MatrixBase<Derived>& v, std::span<const int> ks,
                                      MagnitudeMode mode = MagnitudeMode::l1) {
  for (int k : ks) {
    if (k < 1 || k > v.size()) {
      throw GeometryError("magnitude_concentration: k=" + std::to_string(k) +
                          " outside [1, " + std::to_string(v.size()) + "]");
    }
  }
  std::vector<double> mags(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = static_cast<double>(v(i));
    mags[static_cast<std::size_t>(i)] = mode == MagnitudeMode::l1 ? std::abs(x) : x * x;
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // One descending pass yields both the prefixes and the total, so k = dim is
  // exactly 1 and the result is non-decreasing in k.
  std::vector<double> prefix(mags.size());
  double running = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) prefix[i] = running += mags[i];
  const double total = running;
  if (total == 0.0) throw GeometryError("magnitude_concentration: zero vector");
  std::vector<double> out;
  out.reserve(ks.size());
  for (int k : ks) {
    const double top = prefix[static_cast<std::size_t>(k - 1)];
    out.push_back(mode == MagnitudeMode::l1 ? top / total : std::sqrt(top) / std::sqrt(total));
  }
  return out;
}

template <typename Derived>
double magnitude_concentration(const Eigen::MatrixBase<Derived>& v, int k,
                               MagnitudeMode mode = MagnitudeMode::l1) {
  const int ks[] = {k};
  return magnitude_profile(v, ks, mode).front();
}

/// True for the BOS/EOS surfaces of the supported tokenizers.
bool is_special_token(std::string_view surface);

/// Seeded sample without replacement, sorted ascending. Depends only on
/// (seed, eligible items, sample_size).
std::vector<std::uint64_t> draw_sample(std::span<const ledf::ItemRecord> items,
                                       const SampleSpec& spec);
std::vector<std::uint64_t> draw_sample(const EmbeddingDump& dump, const SampleSpec& spec);

SelfSimilarityResult layer_self_similarity(const EmbeddingDump& dump, const SampleSpec& spec);

MagnitudeResult layer_magnitude(const EmbeddingDump& dump, std::span<const int> ks,
                                const SampleSpec& spec, MagnitudeMode mode = MagnitudeMode::l1);

// Streaming forms: consume the reader's remaining layers one at a time, so at
// most one item_count x dim matrix is resident. The reader must not have
// returned any layer yet.
SelfSimilarityResult layer_self_similarity(ledf::DumpReader& reader, const SampleSpec& spec);

MagnitudeResult layer_magnitude(ledf::DumpReader& reader, std::span<const int> ks,
                                const SampleSpec& spec, MagnitudeMode mode = MagnitudeMode::l1);

const char* to_string(MagnitudeMode mode);
const char* to_string(Eligibility eligibility);

}  // namespace geoprobe

#endif  // GEOPROBE_GEOMETRY_HPP
