// Word- and sentence-level intrinsic evaluators and layer sweeps.
#ifndef GEOPROBE_EVALUATE_HPP
#define GEOPROBE_EVALUATE_HPP

#include "geoprobe/geometry.hpp"
#include "geoprobe/ledf.hpp"
#include "geoprobe/metrics.hpp"
#include "geoprobe/tasks.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace geoprobe {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CoveragePolicy { strict, permissive };

/// Surface -> row lookup over one layer matrix. Keys are NFC-normalized and
/// matched case-sensitively; when a surface repeats, its first row wins.
/// The table views `rows`, which must outlive it.
class VectorTable {
 public:
  VectorTable(std::span<const std::string> keys, const LayerMatrix& rows);

  static VectorTable from_dump(const EmbeddingDump& dump, std::uint32_t layer);

  std::optional<Eigen::Index> find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key).has_value(); }
  auto row(Eigen::Index i) const { return rows_->row(i); }
  const LayerMatrix& matrix() const { return *rows_; }
  std::size_t size() const { return index_.size(); }

 private:
  std::unordered_map<std::string, Eigen::Index> index_;
  const LayerMatrix* rows_;
};

struct CorrelationScore {
  double value = 0.0;
  std::size_t covered = 0;  // pairs (or lexicon words) that entered the correlation
  std::size_t total = 0;
  std::vector<std::string> missing;  // sorted, unique

  bool complete() const { return covered == total; }
};

/// Spearman rho between pair cosines and gold ratings.
CorrelationScore eval_word_task(const WordPairTask& task, const VectorTable& words,
                                CoveragePolicy policy = CoveragePolicy::strict);

/// Looks up the lexicon's pleasant/unpleasant words. Under the permissive
/// policy absent attribute words are dropped.
AttributeSets<float> attribute_vectors(const ValenceLexicon& lexicon, const VectorTable& words,
                                       CoveragePolicy policy = CoveragePolicy::strict);

/// Pearson r between per-word SC-WEAT effect sizes and valence ratings.
CorrelationScore eval_valnorm(const ValenceLexicon& lexicon, const VectorTable& words,
                              const AttributeSets<float>& attributes,
                              CoveragePolicy policy = CoveragePolicy::strict);

/// Spearman rho between sentence-pair cosines and gold scores. Every
/// sentence must be present.
CorrelationScore eval_sts(const SentencePairTask& task, const VectorTable& sentences);

struct LayerSweepReport {
  std::string metric_name;
  std::vector<double> per_layer;
  std::size_t best_layer = 0;
  double best_value = 0.0;
  double top_layer_value = 0.0;
  std::vector<CorrelationScore> details;  // per layer, when the evaluator provides them
};

/// Fills best (first maximum wins) and top (last layer) from per-layer values.
LayerSweepReport summarize_layers(std::string metric_name, std::vector<double> per_layer);

using LayerEvaluator = std::function<CorrelationScore(const VectorTable&)>;

/// Runs `evaluator` on every layer 0..layer_count-1 of the dump.
LayerSweepReport sweep_layers(const EmbeddingDump& dump, const LayerEvaluator& evaluator,
                              std::string metric_name);

/// Self-similarity of every item at every layer, no sampling. The dump must
/// hold sentences with pairwise-distinct surfaces.
SelfSimilarityResult sentence_self_similarity(const EmbeddingDump& dump);

}  // namespace geoprobe

#endif  // GEOPROBE_EVALUATE_HPP
