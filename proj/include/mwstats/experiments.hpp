#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mwstats/io.hpp"

namespace mwstats {

/// Invalid configuration; `field` is the dotted key path (or "<file>:line:col").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Names accepted by `run`.
const std::vector<std::string>& experiment_names();

/// Full configuration tree with the reference-sample defaults. Keys carry their
/// units (kappa_x_mhz, t_max_k, ...).
Json default_config();

/// Merges `patch` into `base`. Unknown keys and type mismatches raise ConfigError
/// naming the offending field.
void merge_config(Json& base, const Json& patch);

/// Parses a JSON config file; syntax errors report file:line:column.
Json read_config_file(const std::filesystem::path& path);

/// Checks the experiment name and every parameter the experiment uses against
/// the module invariants. Throws ConfigError.
void validate_config(const Json& config);

struct RunArtifacts {
  /// File name → contents, written in this order.
  std::vector<std::pair<std::string, std::string>> files;
  Json results;
};

/// Executes the configured experiment in memory. Nothing touches the disk, so a
/// failing run never leaves partial output.
RunArtifacts run_experiment(const Json& config);

/// Writes the artifacts plus results.json and manifest.json into `dir`.
void write_run(const Json& config, const RunArtifacts& artifacts, const std::filesystem::path& dir);

/// Output directory: explicit value, else $MWSTATS_OUTPUT_ROOT/<experiment>-seed<seed>,
/// else ./mwstats-runs/<experiment>-seed<seed>.
std::filesystem::path resolve_output_dir(const Json& config);

/// Files every completed run directory must hold, by experiment.
std::vector<std::string> expected_files(const std::string& experiment);

/// Compares a completed run against the reference values. Throws
/// std::runtime_error listing missing artifacts.
Json build_report(const std::filesystem::path& run_dir);

/// Human-readable table of a report.
std::string format_report(const Json& report);

/// Embedded schema text by name (e.g. "manifest"), or nullopt.
std::optional<std::string> schema_text(const std::string& name);
std::vector<std::string> schema_names();

std::string version_string();

}  // namespace mwstats
