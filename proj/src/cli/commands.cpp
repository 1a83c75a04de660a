#include "geoprobe/cli.hpp"

#include "geoprobe/ledf.hpp"
#include "geoprobe/tasks.hpp"

#ifdef GEOPROBE_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace geoprobe::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string key_of(const std::string& section, const NamedPath& entry) {
  return section + "." + entry.name;
}

void require_section(const std::vector<NamedPath>& list, const std::string& section,
                     const std::string& command) {
  if (list.empty()) {
    throw ConfigError("config section [" + section + "] lists no dumps (needed by " + command + ")");
  }
}

// Rethrows any failure with the config key it belongs to.
template <typename Fn>
auto with_key(const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(key + ": " + e.what());
  }
}

EmbeddingDump load_dump(const std::string& key, const std::string& path) {
  if (!fs::exists(path)) throw ConfigError(key + ": file not found: " + path);
  return with_key(key, [&] { return ledf::read_dump_file(path); });
}

ReportTable make_table(const RunConfig& cfg, std::string name) {
  ReportTable t;
  t.name = std::move(name);
  t.config_hash = cfg.hash();
  t.seed = cfg.seed;
  return t;
}

std::string summary_cell(const LayerSweepReport& r) {
  return "best(" + std::to_string(r.best_layer) + ")=" + fixed6(r.best_value) +
         " top=" + fixed6(r.top_layer_value);
}

const std::optional<std::string>& task_path(const RunConfig& cfg, IntrinsicTask task) {
  switch (task) {
    case IntrinsicTask::rg65: return cfg.rg65;
    case IntrinsicTask::ws353: return cfg.ws353;
    case IntrinsicTask::sl999: return cfg.sl999;
    case IntrinsicTask::sv3500: return cfg.sv3500;
    case IntrinsicTask::valnorm: return cfg.valnorm;
  }
  return cfg.rg65;
}

std::string default_attribute_path(const char* file) {
  return (fs::path(GEOPROBE_DATA_DIR) / "attributes" / file).string();
}

}  // namespace

void ReportTable::set(std::size_t layer, std::size_t column, double value) {
  if (layers.size() <= layer) layers.resize(layer + 1);
  for (auto& row : layers) row.resize(columns.size());
  layers[layer].at(column) = value;
}

std::string to_csv(const ReportTable& t) {
  std::ostringstream s;
  s << "# geoprobe " << t.name << " config=" << t.config_hash << " seed=" << t.seed << "\n";
  s << "layer";
  for (const auto& c : t.columns) s << "," << c;
  s << "\n";
  for (std::size_t l = 0; l < t.layers.size(); ++l) {
    s << l;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      s << ",";
      if (c < t.layers[l].size() && t.layers[l][c]) s << fixed6(*t.layers[l][c]);
    }
    s << "\n";
  }
  for (const auto& [label, cells] : t.extra_rows) {
    s << label;
    for (const auto& cell : cells) s << "," << cell;
    s << "\n";
  }
  return s.str();
}

fs::path write_table(const ReportTable& table, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path path = dir / (table.name + ".csv");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << to_csv(table);
  if (!out) throw std::runtime_error("failed writing " + path.string());
  return path;
}

const char* to_string(IntrinsicTask task) {
  switch (task) {
    case IntrinsicTask::rg65: return "rg65";
    case IntrinsicTask::ws353: return "ws353";
    case IntrinsicTask::sl999: return "sl999";
    case IntrinsicTask::sv3500: return "sv3500";
    case IntrinsicTask::valnorm: return "valnorm";
  }
  return "unknown";
}

std::optional<IntrinsicTask> parse_intrinsic_task(std::string_view name) {
  for (auto t : {IntrinsicTask::rg65, IntrinsicTask::ws353, IntrinsicTask::sl999,
                 IntrinsicTask::sv3500, IntrinsicTask::valnorm}) {
    if (name == to_string(t)) return t;
  }
  return std::nullopt;
}

ReportTable cmd_selfsim(const RunConfig& cfg) {
  require_section(cfg.corpus, "corpus", "selfsim");
  auto table = make_table(cfg, "selfsim");
  for (const auto& e : cfg.corpus) table.columns.push_back(e.name);
  for (std::size_t c = 0; c < cfg.corpus.size(); ++c) {
    const auto key = key_of("corpus", cfg.corpus[c]);
    if (!fs::exists(cfg.corpus[c].path)) throw ConfigError(key + ": file not found: " + cfg.corpus[c].path);
    const auto result = with_key(key, [&] {
      std::ifstream in(cfg.corpus[c].path, std::ios::binary);
      ledf::DumpReader reader(in);
      return layer_self_similarity(reader, cfg.sample_spec());
    });
    for (std::size_t l = 0; l < result.per_layer.size(); ++l) table.set(l, c, result.per_layer[l]);
  }
  return table;
}

ReportTable cmd_magnitude(const RunConfig& cfg) {
  require_section(cfg.corpus, "corpus", "magnitude");
  auto table = make_table(cfg, "magnitude");
  for (const auto& e : cfg.corpus) {
    for (int k : cfg.ks) table.columns.push_back(e.name + "_top" + std::to_string(k));
  }
  for (std::size_t c = 0; c < cfg.corpus.size(); ++c) {
    const auto key = key_of("corpus", cfg.corpus[c]);
    if (!fs::exists(cfg.corpus[c].path)) throw ConfigError(key + ": file not found: " + cfg.corpus[c].path);
    const auto result = with_key(key, [&] {
      std::ifstream in(cfg.corpus[c].path, std::ios::binary);
      ledf::DumpReader reader(in);
      for (int k : cfg.ks) {
        if (static_cast<std::uint32_t>(k) > reader.header().dim) {
          throw ConfigError(key + ": run.ks value " + std::to_string(k) + " exceeds dim " +
                            std::to_string(reader.header().dim));
        }
      }
      return layer_magnitude(reader, cfg.ks, cfg.sample_spec(), cfg.magnitude_mode);
    });
    for (Eigen::Index l = 0; l < result.per_layer_per_k.rows(); ++l) {
      for (std::size_t j = 0; j < cfg.ks.size(); ++j) {
        table.set(static_cast<std::size_t>(l), c * cfg.ks.size() + j,
                  result.per_layer_per_k(l, static_cast<Eigen::Index>(j)));
      }
    }
  }
  return table;
}

ReportTable cmd_intrinsic(const RunConfig& cfg, IntrinsicTask task) {
  const std::string name = to_string(task);
  require_section(cfg.words, "words", "intrinsic " + name);
  const auto& path = task_path(cfg, task);
  if (!path) throw ConfigError("config key tasks." + name + " is not set");

  LayerEvaluator evaluator;
  if (task == IntrinsicTask::valnorm) {
    const auto pleasant = cfg.pleasant.value_or(default_attribute_path("pleasant.txt"));
    const auto unpleasant = cfg.unpleasant.value_or(default_attribute_path("unpleasant.txt"));
    auto lexicon = std::make_shared<ValenceLexicon>(load_valence_lexicon(*path, pleasant, unpleasant));
    evaluator = [lexicon, policy = cfg.coverage](const VectorTable& table) {
      return eval_valnorm(*lexicon, table, attribute_vectors(*lexicon, table, policy), policy);
    };
  } else {
    const auto word_task = *parse_word_task_name(name);
    auto loaded = std::make_shared<WordPairTask>(load_word_task(*path, word_task));
    evaluator = [loaded, policy = cfg.coverage](const VectorTable& table) {
      return eval_word_task(*loaded, table, policy);
    };
  }

  auto table = make_table(cfg, "intrinsic_" + name);
  std::vector<std::string> summary, coverage;
  for (const auto& e : cfg.words) table.columns.push_back(e.name);
  for (std::size_t c = 0; c < cfg.words.size(); ++c) {
    const auto key = key_of("words", cfg.words[c]);
    const auto dump = load_dump(key, cfg.words[c].path);
    const auto report = with_key(key, [&] { return sweep_layers(dump, evaluator, name); });
    for (std::size_t l = 0; l < report.per_layer.size(); ++l) table.set(l, c, report.per_layer[l]);
    summary.push_back(summary_cell(report));
    const auto& d = report.details.front();
    coverage.push_back(std::to_string(d.covered) + "/" + std::to_string(d.total));
  }
  table.extra_rows.emplace_back("summary", std::move(summary));
  table.extra_rows.emplace_back("coverage", std::move(coverage));
  return table;
}

ReportTable cmd_sts(const RunConfig& cfg) {
  require_section(cfg.sentences, "sentences", "sts");
  if (!cfg.sts) throw ConfigError("config key tasks.sts is not set");
  const auto task = std::make_shared<SentencePairTask>(load_sts(*cfg.sts, StsSplit::test));
  const LayerEvaluator evaluator = [task](const VectorTable& t) { return eval_sts(*task, t); };

  auto table = make_table(cfg, "sts");
  std::vector<std::string> summary;
  for (const auto& e : cfg.sentences) table.columns.push_back(e.name);
  for (std::size_t c = 0; c < cfg.sentences.size(); ++c) {
    const auto key = key_of("sentences", cfg.sentences[c]);
    const auto dump = load_dump(key, cfg.sentences[c].path);
    const auto report = with_key(key, [&] { return sweep_layers(dump, evaluator, "sts"); });
    for (std::size_t l = 0; l < report.per_layer.size(); ++l) table.set(l, c, report.per_layer[l]);
    summary.push_back(summary_cell(report));
  }
  table.extra_rows.emplace_back("summary", std::move(summary));
  return table;
}

ReportTable cmd_sentence_selfsim(const RunConfig& cfg) {
  require_section(cfg.sentence_selfsim, "sentence_selfsim", "sentence-selfsim");
  auto table = make_table(cfg, "sentence_selfsim");
  for (const auto& e : cfg.sentence_selfsim) table.columns.push_back(e.name);
  for (std::size_t c = 0; c < cfg.sentence_selfsim.size(); ++c) {
    const auto key = key_of("sentence_selfsim", cfg.sentence_selfsim[c]);
    const auto dump = load_dump(key, cfg.sentence_selfsim[c].path);
    const auto result = with_key(key, [&] { return sentence_self_similarity(dump); });
    for (std::size_t l = 0; l < result.per_layer.size(); ++l) table.set(l, c, result.per_layer[l]);
  }
  return table;
}

bool Manifest::ok() const {
  for (const auto& c : commands) {
    if (c.status == CommandOutcome::Status::failed) return false;
  }
  return true;
}

Manifest cmd_report(const RunConfig& cfg, const fs::path& out_dir) {
  Manifest manifest;
  manifest.config_path = cfg.source.string();
  manifest.config_hash = cfg.hash();
  manifest.seed = cfg.seed;

  struct Planned {
    std::string name;
    std::string missing;  // why the command is skipped; empty when runnable
    std::function<ReportTable()> run;
  };
  auto need = [](bool ok, const std::string& why) { return ok ? std::string() : why; };
  std::vector<Planned> plan;
  plan.push_back({"selfsim", need(!cfg.corpus.empty(), "no dumps in [corpus]"),
                  [&] { return cmd_selfsim(cfg); }});
  plan.push_back({"magnitude", need(!cfg.corpus.empty(), "no dumps in [corpus]"),
                  [&] { return cmd_magnitude(cfg); }});
  for (auto task : {IntrinsicTask::rg65, IntrinsicTask::ws353, IntrinsicTask::sl999,
                    IntrinsicTask::sv3500, IntrinsicTask::valnorm}) {
    std::string why = cfg.words.empty() ? "no dumps in [words]" : "";
    if (why.empty() && !task_path(cfg, task)) why = std::string("tasks.") + to_string(task) + " not set";
    plan.push_back({std::string("intrinsic:") + to_string(task), why,
                    [&cfg, task] { return cmd_intrinsic(cfg, task); }});
  }
  {
    std::string why = cfg.sentences.empty() ? "no dumps in [sentences]" : "";
    if (why.empty() && !cfg.sts) why = "tasks.sts not set";
    plan.push_back({"sts", why, [&] { return cmd_sts(cfg); }});
  }
  plan.push_back({"sentence-selfsim",
                  need(!cfg.sentence_selfsim.empty(), "no dumps in [sentence_selfsim]"),
                  [&] { return cmd_sentence_selfsim(cfg); }});

  std::string failed;
  for (auto& step : plan) {
    CommandOutcome outcome;
    outcome.name = step.name;
    if (!failed.empty()) {
      outcome.status = CommandOutcome::Status::skipped;
      outcome.message = "not run: " + failed + " failed";
    } else if (!step.missing.empty()) {
      outcome.status = CommandOutcome::Status::skipped;
      outcome.message = step.missing;
    } else {
      try {
        const auto path = write_table(step.run(), out_dir);
        outcome.outputs.push_back(path.filename().string());
      } catch (const std::exception& e) {
        outcome.status = CommandOutcome::Status::failed;
        outcome.message = e.what();
        failed = step.name;
      }
    }
    manifest.commands.push_back(std::move(outcome));
  }
  return manifest;
}

fs::path write_manifest(const Manifest& manifest, const fs::path& dir) {
  using nlohmann::ordered_json;
  fs::create_directories(dir);
  ordered_json j;
  j["tool"] = "geoprobe";
  j["config"] = manifest.config_path;
  j["config_hash"] = manifest.config_hash;
  j["seed"] = manifest.seed;
  j["status"] = manifest.ok() ? "ok" : "failed";
  ordered_json commands = ordered_json::array();
  for (const auto& c : manifest.commands) {
    for (const auto& out : c.outputs) {
      if (!fs::exists(dir / out)) {
        throw std::runtime_error("manifest lists " + out + " but it was not written");
      }
    }
    ordered_json entry;
    entry["name"] = c.name;
    entry["status"] = c.status == CommandOutcome::Status::ok        ? "ok"
                      : c.status == CommandOutcome::Status::skipped ? "skipped"
                                                                    : "failed";
    entry["outputs"] = c.outputs;
    if (!c.message.empty()) entry["message"] = c.message;
    commands.push_back(std::move(entry));
  }
  j["commands"] = std::move(commands);
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path.string());
  return path;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layerwise embedding geometry and intrinsic evaluation"};
  app.name("geoprobe");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sample_size;
  std::optional<std::string> out_dir;
  bool allow_missing = false;
  std::optional<std::string> magnitude_mode;
  std::string task_name;

  app.add_option("--config", config_path, "Run configuration (INI)")->required();
  app.add_option("--seed", seed, "Sampling seed (default 42)");
  app.add_option("--sample-size", sample_size, "Tokens sampled per corpus dump");
  app.add_option("--out", out_dir, "Output directory (overrides GEOPROBE_OUT)");
  app.add_flag("--allow-missing", allow_missing, "Skip task words absent from a dump");
  app.add_option("--magnitude-mode", magnitude_mode, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));

  auto* selfsim = app.add_subcommand("selfsim", "Corpus-token self-similarity by layer");
  auto* magnitude = app.add_subcommand("magnitude", "Top-k magnitude concentration by layer");
  auto* intrinsic = app.add_subcommand("intrinsic", "Word-level intrinsic evaluation by layer");
  intrinsic->add_option("--task", task_name, "rg65|ws353|sl999|sv3500|valnorm")
      ->required()
      ->check(CLI::IsMember({"rg65", "ws353", "sl999", "sv3500", "valnorm"}));
  auto* sts = app.add_subcommand("sts", "STS Benchmark by layer");
  auto* sentence_selfsim = app.add_subcommand("sentence-selfsim", "Sentence self-similarity by layer");
  auto* report = app.add_subcommand("report", "Run every configured command");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (sample_size) cfg.sample_size = *sample_size;
    if (allow_missing) cfg.coverage = CoveragePolicy::permissive;
    if (magnitude_mode) cfg.magnitude_mode = *magnitude_mode == "l2" ? MagnitudeMode::l2 : MagnitudeMode::l1;
    if (out_dir) {
      cfg.out_dir = *out_dir;
    } else if (const char* env = std::getenv("GEOPROBE_OUT"); env && *env) {
      cfg.out_dir = env;
    }
    validate(cfg);
  } catch (const std::exception& e) {
    err << "geoprobe: " << e.what() << "\n";
    return 2;
  }

  const fs::path dir = cfg.out_dir;
  Manifest manifest;
  try {
    if (report->parsed()) {
      manifest = cmd_report(cfg, dir);
    } else {
      manifest.config_path = cfg.source.string();
      manifest.config_hash = cfg.hash();
      manifest.seed = cfg.seed;
      CommandOutcome outcome;
      std::function<ReportTable()> command;
      if (selfsim->parsed()) {
        outcome.name = "selfsim";
        command = [&] { return cmd_selfsim(cfg); };
      } else if (magnitude->parsed()) {
        outcome.name = "magnitude";
        command = [&] { return cmd_magnitude(cfg); };
      } else if (intrinsic->parsed()) {
        outcome.name = "intrinsic:" + task_name;
        command = [&] { return cmd_intrinsic(cfg, *parse_intrinsic_task(task_name)); };
      } else if (sts->parsed()) {
        outcome.name = "sts";
        command = [&] { return cmd_sts(cfg); };
      } else if (sentence_selfsim->parsed()) {
        outcome.name = "sentence-selfsim";
        command = [&] { return cmd_sentence_selfsim(cfg); };
      }
      try {
        outcome.outputs.push_back(write_table(command(), dir).filename().string());
      } catch (const std::exception& e) {
        outcome.status = CommandOutcome::Status::failed;
        outcome.message = e.what();
      }
      manifest.commands.push_back(std::move(outcome));
    }
    write_manifest(manifest, dir);
  } catch (const std::exception& e) {
    err << "geoprobe: " << e.what() << "\n";
    return 1;
  }

  for (const auto& c : manifest.commands) {
    switch (c.status) {
      case CommandOutcome::Status::ok:
        out << c.name << ": wrote " << (dir / c.outputs.front()).string() << "\n";
        break;
      case CommandOutcome::Status::skipped:
        out << c.name << ": skipped (" << c.message << ")\n";
        break;
      case CommandOutcome::Status::failed:
        err << "geoprobe: " << c.name << " failed: " << c.message << "\n";
        break;
    }
  }
  return manifest.ok() ? 0 : 1;
}

}  // namespace geoprobe::cli
