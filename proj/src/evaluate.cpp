#include "geoprobe/evaluate.hpp"

#include "geoprobe/text.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace geoprobe {

namespace {

constexpr std::size_t kMissingListed = 20;

std::string format_missing(const std::vector<std::string>& missing) {
  std::string out;
  for (std::size_t i = 0; i < missing.size() && i < kMissingListed; ++i) {
    if (i) out += ", ";
    out += missing[i];
  }
  if (missing.size() > kMissingListed) {
    out += ", ... (" + std::to_string(missing.size()) + " total)";
  }
  return out;
}

std::vector<std::string> sorted_unique(const std::set<std::string>& s) {
  return {s.begin(), s.end()};
}

}  // namespace

VectorTable::VectorTable(std::span<const std::string> keys, const LayerMatrix& rows)
    : rows_(&rows) {
  if (static_cast<Eigen::Index>(keys.size()) != rows.rows()) {
    throw EvalError("vector table: " + std::to_string(keys.size()) + " keys for " +
                    std::to_string(rows.rows()) + " rows");
  }
  index_.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    index_.try_emplace(text::nfc(keys[i]), static_cast<Eigen::Index>(i));
  }
}

VectorTable VectorTable::from_dump(const EmbeddingDump& dump, std::uint32_t layer) {
  if (layer >= dump.layers.size()) {
    throw EvalError("layer " + std::to_string(layer) + " out of range");
  }
  std::vector<std::string> keys;
  keys.reserve(dump.items.size());
  for (const auto& item : dump.items) keys.push_back(item.surface);
  return VectorTable(keys, dump.layers[layer]);
}

std::optional<Eigen::Index> VectorTable::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CorrelationScore eval_word_task(const WordPairTask& task, const VectorTable& words,
                                CoveragePolicy policy) {
  std::set<std::string> missing;
  std::vector<double> cosines;
  std::vector<double> gold;
  for (const auto& pair : task.pairs) {
    const auto a = words.find(pair.word_a);
    const auto b = words.find(pair.word_b);
    if (!a) missing.insert(pair.word_a);
    if (!b) missing.insert(pair.word_b);
    if (!a || !b) continue;
    cosines.push_back(cosine(words.row(*a), words.row(*b)));
    gold.push_back(pair.gold);
  }
  CorrelationScore score;
  score.total = task.pairs.size();
  score.covered = cosines.size();
  score.missing = sorted_unique(missing);
  if (policy == CoveragePolicy::strict && !score.missing.empty()) {
    throw EvalError(std::string(to_string(task.name)) + ": missing words: " +
                    format_missing(score.missing));
  }
  score.value = spearman(cosines, gold);
  return score;
}

AttributeSets<float> attribute_vectors(const ValenceLexicon& lexicon, const VectorTable& words,
                                       CoveragePolicy policy) {
  std::set<std::string> missing;
  auto gather = [&](const std::vector<std::string>& list) {
    std::vector<Eigen::Index> rows;
    for (const auto& w : list) {
      if (auto r = words.find(w)) {
        rows.push_back(*r);
      } else {
        missing.insert(w);
      }
    }
    AttributeSets<float>::Matrix m(static_cast<Eigen::Index>(rows.size()), words.matrix().cols());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = words.row(rows[i]);
    return m;
  };
  AttributeSets<float> sets{gather(lexicon.pleasant), gather(lexicon.unpleasant)};
  if (policy == CoveragePolicy::strict && !missing.empty()) {
    throw EvalError("valnorm: missing attribute words: " + format_missing(sorted_unique(missing)));
  }
  if (sets.pleasant.rows() == 0 || sets.unpleasant.rows() == 0) {
    throw EvalError("valnorm: an attribute set has no embedded words");
  }
  return sets;
}

CorrelationScore eval_valnorm(const ValenceLexicon& lexicon, const VectorTable& words,
                              const AttributeSets<float>& attributes, CoveragePolicy policy) {
  std::set<std::string> missing;
  std::vector<double> effects;
  std::vector<double> ratings;
  for (const auto& entry : lexicon.entries) {
    const auto r = words.find(entry.word);
    if (!r) {
      missing.insert(entry.word);
      continue;
    }
    effects.push_back(sc_weat(words.row(*r), attributes).d);
    ratings.push_back(entry.rating);
  }
  CorrelationScore score;
  score.total = lexicon.entries.size();
  score.covered = effects.size();
  score.missing = sorted_unique(missing);
  if (policy == CoveragePolicy::strict && !score.missing.empty()) {
    throw EvalError("valnorm: missing words: " + format_missing(score.missing));
  }
  try {
    score.value = pearson(effects, ratings);
  } catch (const MetricError& e) {
    throw EvalError(std::string("valnorm: ") + e.what());
  }
  return score;
}

CorrelationScore eval_sts(const SentencePairTask& task, const VectorTable& sentences) {
  std::set<std::string> missing;
  std::vector<double> cosines;
  std::vector<double> gold;
  for (const auto& pair : task.pairs) {
    const auto a = sentences.find(pair.sentence_a);
    const auto b = sentences.find(pair.sentence_b);
    if (!a) missing.insert(pair.sentence_a);
    if (!b) missing.insert(pair.sentence_b);
    if (!a || !b) continue;
    cosines.push_back(cosine(sentences.row(*a), sentences.row(*b)));
    gold.push_back(pair.gold);
  }
  if (!missing.empty()) {
    throw EvalError("sts: " + std::to_string(missing.size()) + " sentences missing from the dump: " +
                    format_missing(sorted_unique(missing)));
  }
  CorrelationScore score;
  score.total = task.pairs.size();
  score.covered = cosines.size();
  score.value = spearman(cosines, gold);
  return score;
}

LayerSweepReport summarize_layers(std::string metric_name, std::vector<double> per_layer) {
  if (per_layer.empty()) throw EvalError("layer sweep over zero layers");
  LayerSweepReport report;
  report.metric_name = std::move(metric_name);
  report.per_layer = std::move(per_layer);
  report.best_layer = 0;
  for (std::size_t i = 1; i < report.per_layer.size(); ++i) {
    if (report.per_layer[i] > report.per_layer[report.best_layer]) report.best_layer = i;
  }
  report.best_value = report.per_layer[report.best_layer];
  report.top_layer_value = report.per_layer.back();
  return report;
}

LayerSweepReport sweep_layers(const EmbeddingDump& dump, const LayerEvaluator& evaluator,
                              std::string metric_name) {
  std::vector<std::string> keys;
  keys.reserve(dump.items.size());
  for (const auto& item : dump.items) keys.push_back(item.surface);

  std::vector<CorrelationScore> details(dump.layers.size());
  detail::parallel_for(dump.layers.size(), [&](std::size_t layer) {
    const VectorTable table(keys, dump.layers[layer]);
    details[layer] = evaluator(table);
  });
  std::vector<double> values;
  values.reserve(details.size());
  for (const auto& d : details) values.push_back(d.value);
  auto report = summarize_layers(std::move(metric_name), std::move(values));
  report.details = std::move(details);
  return report;
}

SelfSimilarityResult sentence_self_similarity(const EmbeddingDump& dump) {
  if (dump.header.item_kind != ledf::ItemKind::sentence) {
    throw EvalError(std::string("sentence self-similarity needs a sentence dump, got ") +
                    ledf::to_string(dump.header.item_kind));
  }
  std::unordered_set<std::string> seen;
  for (const auto& item : dump.items) {
    if (!seen.insert(item.surface).second) {
      throw EvalError("duplicate sentence in self-similarity dump (item " + std::to_string(item.id) +
                      "): " + item.surface);
    }
  }
  SelfSimilarityResult result;
  result.spec.sample_size = dump.items.size();
  result.spec.eligibility = Eligibility::all_items;
  result.item_ids.resize(dump.items.size());
  for (std::size_t i = 0; i < dump.items.size(); ++i) result.item_ids[i] = i;
  result.per_layer.assign(dump.layers.size(), 0.0);
  detail::parallel_for(dump.layers.size(), [&](std::size_t layer) {
    result.per_layer[layer] = self_similarity(dump.layers[layer]);
  });
  return result;
}

}  // namespace geoprobe
