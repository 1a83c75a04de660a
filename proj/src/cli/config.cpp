#include "geoprobe/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace geoprobe::cli {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(key + ": '" + value + "' is not a non-negative integer");
  }
  return out;
}

std::vector<int> parse_ks(const std::string& value) {
  std::vector<int> ks;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("run.ks: empty entry in '" + value + "'");
    ks.push_back(parse_integer<int>("run.ks", item.substr(first, last - first + 1)));
  }
  return ks;
}

std::string resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(std::istream& in, const fs::path& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source.string() + ": " + e.what());
  }

  RunConfig cfg;
  cfg.source = source;
  const fs::path base = source.parent_path();

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(source.string() + ": key '" + section + "' outside a section");
    }
    auto list_into = [&](std::vector<NamedPath>& list) {
      for (const auto& [key, value] : body) list.push_back({key, resolve(base, value.data())});
    };
    if (section == "run") {
      for (const auto& [key, node] : body) {
        const std::string value = node.data();
        const std::string qualified = "run." + key;
        if (key == "seed") {
          cfg.seed = parse_integer<std::uint64_t>(qualified, value);
        } else if (key == "sample_size") {
          cfg.sample_size = parse_integer<std::size_t>(qualified, value);
        } else if (key == "ks") {
          cfg.ks = parse_ks(value);
        } else if (key == "out") {
          cfg.out_dir = resolve(base, value);
        } else if (key == "coverage") {
          if (value == "strict") cfg.coverage = CoveragePolicy::strict;
          else if (value == "permissive") cfg.coverage = CoveragePolicy::permissive;
          else throw ConfigError(qualified + ": expected strict or permissive");
        } else if (key == "magnitude_mode") {
          if (value == "l1") cfg.magnitude_mode = MagnitudeMode::l1;
          else if (value == "l2") cfg.magnitude_mode = MagnitudeMode::l2;
          else throw ConfigError(qualified + ": expected l1 or l2");
        } else if (key == "eligibility") {
          if (value == "exclude_special_tokens") cfg.eligibility = Eligibility::exclude_special_tokens;
          else if (value == "all_items") cfg.eligibility = Eligibility::all_items;
          else throw ConfigError(qualified + ": expected exclude_special_tokens or all_items");
        } else {
          throw ConfigError("unknown key " + qualified);
        }
      }
    } else if (section == "corpus") {
      list_into(cfg.corpus);
    } else if (section == "words") {
      list_into(cfg.words);
    } else if (section == "sentences") {
      list_into(cfg.sentences);
    } else if (section == "sentence_selfsim") {
      list_into(cfg.sentence_selfsim);
    } else if (section == "tasks") {
      for (const auto& [key, node] : body) {
        const std::string path = resolve(base, node.data());
        if (key == "rg65") cfg.rg65 = path;
        else if (key == "ws353") cfg.ws353 = path;
        else if (key == "sl999") cfg.sl999 = path;
        else if (key == "sv3500") cfg.sv3500 = path;
        else if (key == "valnorm") cfg.valnorm = path;
        else if (key == "pleasant") cfg.pleasant = path;
        else if (key == "unpleasant") cfg.unpleasant = path;
        else if (key == "sts") cfg.sts = path;
        else throw ConfigError("unknown key tasks." + key);
      }
    } else {
      throw ConfigError(source.string() + ": unknown section [" + section + "]");
    }
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path);
}

void validate(const RunConfig& cfg) {
  if (cfg.sample_size < 2) throw ConfigError("run.sample_size must be at least 2");
  if (cfg.ks.empty()) throw ConfigError("run.ks must list at least one value");
  for (int k : cfg.ks) {
    if (k < 1) throw ConfigError("run.ks values must be at least 1");
  }
  auto check = [](const std::string& key, const std::string& path) {
    if (!fs::exists(path)) throw ConfigError(key + ": file not found: " + path);
  };
  for (const auto& [section, list] :
       {std::pair{"corpus", &cfg.corpus}, std::pair{"words", &cfg.words},
        std::pair{"sentences", &cfg.sentences}, std::pair{"sentence_selfsim", &cfg.sentence_selfsim}}) {
    for (const auto& entry : *list) check(std::string(section) + "." + entry.name, entry.path);
  }
  for (const auto& [key, value] :
       {std::pair{"rg65", &cfg.rg65}, std::pair{"ws353", &cfg.ws353}, std::pair{"sl999", &cfg.sl999},
        std::pair{"sv3500", &cfg.sv3500}, std::pair{"valnorm", &cfg.valnorm},
        std::pair{"pleasant", &cfg.pleasant}, std::pair{"unpleasant", &cfg.unpleasant},
        std::pair{"sts", &cfg.sts}}) {
    if (*value) check(std::string("tasks.") + key, **value);
  }
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "seed=" << seed << "\n"
    << "sample_size=" << sample_size << "\n"
    << "ks=";
  for (std::size_t i = 0; i < ks.size(); ++i) s << (i ? "," : "") << ks[i];
  s << "\n"
    << "coverage=" << (coverage == CoveragePolicy::strict ? "strict" : "permissive") << "\n"
    << "magnitude_mode=" << to_string(magnitude_mode) << "\n"
    << "eligibility=" << to_string(eligibility) << "\n";
  for (const auto& [section, list] :
       {std::pair{"corpus", &corpus}, std::pair{"words", &words}, std::pair{"sentences", &sentences},
        std::pair{"sentence_selfsim", &sentence_selfsim}}) {
    for (const auto& e : *list) s << section << "." << e.name << "=" << e.path << "\n";
  }
  for (const auto& [key, value] :
       {std::pair{"rg65", &rg65}, std::pair{"ws353", &ws353}, std::pair{"sl999", &sl999},
        std::pair{"sv3500", &sv3500}, std::pair{"valnorm", &valnorm}, std::pair{"pleasant", &pleasant},
        std::pair{"unpleasant", &unpleasant}, std::pair{"sts", &sts}}) {
    if (*value) s << "tasks." << key << "=" << **value << "\n";
  }
  return s.str();
}

std::string RunConfig::hash() const {
  const std::string text = canonical();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace geoprobe::cli
