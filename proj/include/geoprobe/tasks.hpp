// Intrinsic evaluation task files: word-pair similarity/relatedness sets, the
// valence lexicon with its attribute word lists, and the STS Benchmark.
#ifndef GEOPROBE_TASKS_HPP
#define GEOPROBE_TASKS_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geoprobe {

class TaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class WordTaskName { rg65, ws353, sl999, sv3500 };

struct RatingScale {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const RatingScale&) const = default;
};

struct WordPair {
  std::string word_a;
  std::string word_b;
  double gold = 0.0;
};

struct WordPairTask {
  WordTaskName name = WordTaskName::rg65;
  std::vector<WordPair> pairs;
  RatingScale scale;
};

const char* to_string(WordTaskName name);
std::optional<WordTaskName> parse_word_task_name(std::string_view name);
/// Published sizes: RG65 65, WS-353 353, SimLex-999 999, SimVerb-3500 3500.
std::size_t expected_pair_count(WordTaskName name);
RatingScale rating_scale(WordTaskName name);

/// Reads `word_a<TAB>word_b<TAB>rating` lines; blank and '#' lines are
/// skipped. Words are lowercased and NFC-normalized.
WordPairTask read_word_task(std::istream& in, WordTaskName name, const std::string& source);
WordPairTask load_word_task(const std::string& path, WordTaskName name);

struct ValenceEntry {
  std::string word;
  double rating = 0.0;
};

struct ValenceLexicon {
  std::vector<ValenceEntry> entries;
  std::vector<std::string> pleasant;
  std::vector<std::string> unpleasant;
};

/// `word,rating` lines; an optional `word,rating` header line is skipped.
std::vector<ValenceEntry> read_valence_entries(std::istream& in, const std::string& source);
/// One word per line.
std::vector<std::string> read_word_list(std::istream& in, const std::string& source);

/// Throws TaskError when either list is empty or the lists overlap.
ValenceLexicon make_valence_lexicon(std::vector<ValenceEntry> entries,
                                    std::vector<std::string> pleasant,
                                    std::vector<std::string> unpleasant);
ValenceLexicon load_valence_lexicon(const std::string& lexicon_path,
                                    const std::string& pleasant_path,
                                    const std::string& unpleasant_path);

enum class StsSplit { train, dev, test };

struct SentencePair {
  std::string genre;
  std::string sentence_a;
  std::string sentence_b;
  double gold = 0.0;  // [0, 5]
};

struct SentencePairTask {
  StsSplit split = StsSplit::test;
  std::vector<SentencePair> pairs;
};

const char* to_string(StsSplit split);
std::optional<StsSplit> parse_sts_split(std::string_view name);
/// train 5,749 + dev 1,500 + test 1,379 = 8,628 pairs.
std::size_t expected_pair_count(StsSplit split);

/// STS Benchmark TSV: genre, file, year, id, score, sentence1, sentence2 and
/// optional trailing columns. Sentences are NFC-normalized, case preserved.
SentencePairTask read_sts(std::istream& in, StsSplit split, const std::string& source);
SentencePairTask load_sts(const std::string& path, StsSplit split);

}  // namespace geoprobe

#endif  // GEOPROBE_TASKS_HPP
