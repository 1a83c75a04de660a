#include "geoprobe/tasks.hpp"

#include "geoprobe/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>

namespace geoprobe {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<double> parse_number(std::string_view s) {
  s = text::trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::string where(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TaskError("cannot open " + path);
  return in;
}

// Calls fn(line, line_no) for every non-blank, non-comment line.
template <typename Fn>
void for_each_data_line(std::istream& in, Fn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    fn(line, line_no);
  }
}

std::string normalized_word(std::string_view field, const std::string& at) {
  const auto word = text::trim(field);
  if (word.empty()) throw TaskError(at + ": empty word");
  try {
    return text::lower_nfc(word);
  } catch (const std::invalid_argument& e) {
    throw TaskError(at + ": " + e.what());
  }
}

}  // namespace

const char* to_string(WordTaskName name) {
  switch (name) {
    case WordTaskName::rg65: return "rg65";
    case WordTaskName::ws353: return "ws353";
    case WordTaskName::sl999: return "sl999";
    case WordTaskName::sv3500: return "sv3500";
  }
  return "unknown";
}

std::optional<WordTaskName> parse_word_task_name(std::string_view name) {
  for (auto t : {WordTaskName::rg65, WordTaskName::ws353, WordTaskName::sl999, WordTaskName::sv3500}) {
    if (name == to_string(t)) return t;
  }
  return std::nullopt;
}

std::size_t expected_pair_count(WordTaskName name) {
  switch (name) {
    case WordTaskName::rg65: return 65;
    case WordTaskName::ws353: return 353;
    case WordTaskName::sl999: return 999;
    case WordTaskName::sv3500: return 3500;
  }
  return 0;
}

RatingScale rating_scale(WordTaskName name) {
  return name == WordTaskName::rg65 ? RatingScale{0.0, 4.0} : RatingScale{0.0, 10.0};
}

WordPairTask read_word_task(std::istream& in, WordTaskName name, const std::string& source) {
  WordPairTask task;
  task.name = name;
  task.scale = rating_scale(name);
  for_each_data_line(in, [&](std::string_view line, std::size_t line_no) {
    const auto at = where(source, line_no);
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 3) {
      throw TaskError(at + ": expected word_a<TAB>word_b<TAB>rating, found " +
                      std::to_string(fields.size()) + " fields");
    }
    const auto rating = parse_number(fields[2]);
    if (!rating) throw TaskError(at + ": rating '" + std::string(fields[2]) + "' is not a number");
    if (*rating < task.scale.min || *rating > task.scale.max) {
      throw TaskError(at + ": rating " + std::string(text::trim(fields[2])) + " outside the " +
                      to_string(name) + " scale");
    }
    task.pairs.push_back({normalized_word(fields[0], at), normalized_word(fields[1], at), *rating});
  });
  const auto expected = expected_pair_count(name);
  if (task.pairs.size() != expected) {
    throw TaskError(source + ": " + to_string(name) + " expects " + std::to_string(expected) +
                    " pairs, found " + std::to_string(task.pairs.size()));
  }
  return task;
}

WordPairTask load_word_task(const std::string& path, WordTaskName name) {
  auto in = open_or_throw(path);
  return read_word_task(in, name, path);
}

std::vector<ValenceEntry> read_valence_entries(std::istream& in, const std::string& source) {
  std::vector<ValenceEntry> entries;
  for_each_data_line(in, [&](std::string_view line, std::size_t line_no) {
    const auto at = where(source, line_no);
    const auto fields = split_fields(line, ',');
    if (fields.size() != 2) throw TaskError(at + ": expected word,rating");
    const auto rating = parse_number(fields[1]);
    if (!rating) {
      if (entries.empty() && text::trim(fields[0]) == "word" && text::trim(fields[1]) == "rating") return;
      throw TaskError(at + ": rating '" + std::string(fields[1]) + "' is not a number");
    }
    entries.push_back({normalized_word(fields[0], at), *rating});
  });
  if (entries.empty()) throw TaskError(source + ": valence lexicon is empty");
  return entries;
}

std::vector<std::string> read_word_list(std::istream& in, const std::string& source) {
  std::vector<std::string> words;
  for_each_data_line(in, [&](std::string_view line, std::size_t line_no) {
    words.push_back(normalized_word(line, where(source, line_no)));
  });
  return words;
}

ValenceLexicon make_valence_lexicon(std::vector<ValenceEntry> entries,
                                    std::vector<std::string> pleasant,
                                    std::vector<std::string> unpleasant) {
  if (entries.empty()) throw TaskError("valence lexicon is empty");
  if (pleasant.empty() || unpleasant.empty()) throw TaskError("attribute word lists must be non-empty");
  const std::set<std::string> p(pleasant.begin(), pleasant.end());
  for (const auto& w : unpleasant) {
    if (p.contains(w)) throw TaskError("attribute word '" + w + "' is both pleasant and unpleasant");
  }
  return {std::move(entries), std::move(pleasant), std::move(unpleasant)};
}

ValenceLexicon load_valence_lexicon(const std::string& lexicon_path,
                                    const std::string& pleasant_path,
                                    const std::string& unpleasant_path) {
  auto lex = open_or_throw(lexicon_path);
  auto pl = open_or_throw(pleasant_path);
  auto un = open_or_throw(unpleasant_path);
  return make_valence_lexicon(read_valence_entries(lex, lexicon_path),
                              read_word_list(pl, pleasant_path),
                              read_word_list(un, unpleasant_path));
}

const char* to_string(StsSplit split) {
  switch (split) {
    case StsSplit::train: return "train";
    case StsSplit::dev: return "dev";
    case StsSplit::test: return "test";
  }
  return "unknown";
}

std::optional<StsSplit> parse_sts_split(std::string_view name) {
  for (auto s : {StsSplit::train, StsSplit::dev, StsSplit::test}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::size_t expected_pair_count(StsSplit split) {
  switch (split) {
    case StsSplit::train: return 5749;
    case StsSplit::dev: return 1500;
    case StsSplit::test: return 1379;
  }
  return 0;
}

SentencePairTask read_sts(std::istream& in, StsSplit split, const std::string& source) {
  SentencePairTask task;
  task.split = split;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    const auto at = where(source, line_no);
    const auto fields = split_fields(line, '\t');
    if (fields.size() < 7) {
      throw TaskError(at + ": expected at least 7 tab-separated columns, found " +
                      std::to_string(fields.size()));
    }
    const auto score = parse_number(fields[4]);
    if (!score) throw TaskError(at + ": score '" + std::string(fields[4]) + "' is not a number");
    if (*score < 0.0 || *score > 5.0) throw TaskError(at + ": score outside [0, 5]");
    SentencePair pair;
    pair.genre = std::string(fields[0]);
    pair.gold = *score;
    try {
      pair.sentence_a = text::nfc(text::trim(fields[5]));
      pair.sentence_b = text::nfc(text::trim(fields[6]));
    } catch (const std::invalid_argument& e) {
      throw TaskError(at + ": " + e.what());
    }
    if (pair.sentence_a.empty() || pair.sentence_b.empty()) throw TaskError(at + ": empty sentence");
    task.pairs.push_back(std::move(pair));
  }
  const auto expected = expected_pair_count(split);
  if (task.pairs.size() != expected) {
    throw TaskError(source + ": STS " + to_string(split) + " split expects " +
                    std::to_string(expected) + " pairs, found " + std::to_string(task.pairs.size()));
  }
  return task;
}

SentencePairTask load_sts(const std::string& path, StsSplit split) {
  auto in = open_or_throw(path);
  return read_sts(in, split, path);
}

}  // namespace geoprobe
