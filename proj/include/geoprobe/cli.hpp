// Command orchestration for the geoprobe tool: run configuration, per-layer
// report tables and the report bundle manifest.
#ifndef GEOPROBE_CLI_HPP
#define GEOPROBE_CLI_HPP

#include "geoprobe/evaluate.hpp"
#include "geoprobe/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoprobe::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A config entry `name = path` inside one section; name becomes the column.
struct NamedPath {
  std::string name;
  std::string path;
};

// Config file (INI):
//
//   [run]        seed, sample_size, ks (comma list), out, coverage
//                (strict|permissive), magnitude_mode (l1|l2), eligibility
//                (exclude_special_tokens|all_items)
//   [corpus]     corpus-token dumps, one per model         -> selfsim, magnitude
//   [words]      decontextualized-word dumps per protocol  -> intrinsic
//   [sentences]  sentence-embedding dumps per protocol     -> sts
//   [sentence_selfsim]  deduplicated sentence dumps        -> sentence-selfsim
//   [tasks]      rg65, ws353, sl999, sv3500, valnorm, pleasant, unpleasant, sts
//
// Relative paths resolve against the config file's directory.
struct RunConfig {
  std::filesystem::path source;
  std::vector<NamedPath> corpus;
  std::vector<NamedPath> words;
  std::vector<NamedPath> sentences;
  std::vector<NamedPath> sentence_selfsim;

  std::optional<std::string> rg65, ws353, sl999, sv3500;
  std::optional<std::string> valnorm, pleasant, unpleasant;
  std::optional<std::string> sts;

  std::size_t sample_size = 10000;
  std::uint64_t seed = 42;
  std::vector<int> ks = {5, 8};
  std::string out_dir = "geoprobe-out";
  CoveragePolicy coverage = CoveragePolicy::strict;
  MagnitudeMode magnitude_mode = MagnitudeMode::l1;
  Eligibility eligibility = Eligibility::exclude_special_tokens;

  SampleSpec sample_spec() const { return {sample_size, seed, eligibility}; }

  /// Stable text form of every setting that affects emitted numbers.
  std::string canonical() const;
  /// Hex SHA-256 of canonical().
  std::string hash() const;
};

RunConfig parse_config(std::istream& in, const std::filesystem::path& source);
RunConfig load_config(const std::filesystem::path& path);

/// Checks referenced paths, sample_size >= 2 and ks. Dimension bounds on ks
/// are checked once dumps are opened.
void validate(const RunConfig& config);

enum class IntrinsicTask { rg65, ws353, sl999, sv3500, valnorm };
const char* to_string(IntrinsicTask task);
std::optional<IntrinsicTask> parse_intrinsic_task(std::string_view name);

/// Per-layer values keyed by column; extra labelled rows follow the layers.
struct ReportTable {
  std::string name;  // output file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> layers;  // [layer][column]
  std::vector<std::pair<std::string, std::vector<std::string>>> extra_rows;
  std::string config_hash;
  std::uint64_t seed = 0;

  void set(std::size_t layer, std::size_t column, double value);
};

/// CSV with a provenance comment line, layer-ascending rows, fixed 6-decimal
/// numbers.
std::string to_csv(const ReportTable& table);
std::filesystem::path write_table(const ReportTable& table, const std::filesystem::path& dir);

ReportTable cmd_selfsim(const RunConfig& config);
ReportTable cmd_magnitude(const RunConfig& config);
ReportTable cmd_intrinsic(const RunConfig& config, IntrinsicTask task);
ReportTable cmd_sts(const RunConfig& config);
ReportTable cmd_sentence_selfsim(const RunConfig& config);

struct CommandOutcome {
  std::string name;
  enum class Status { ok, skipped, failed } status = Status::ok;
  std::vector<std::string> outputs;  // file names relative to the output dir
  std::string message;
};

struct Manifest {
  std::string config_path;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<CommandOutcome> commands;
  bool ok() const;
};

/// Runs every configured command, stopping at the first failure; commands
/// whose inputs are not configured are recorded as skipped.
Manifest cmd_report(const RunConfig& config, const std::filesystem::path& out_dir);

/// Writes manifest.json and checks that every listed output exists.
std::filesystem::path write_manifest(const Manifest& manifest, const std::filesystem::path& dir);

/// Full command-line entry point; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoprobe::cli

#endif  // GEOPROBE_CLI_HPP
