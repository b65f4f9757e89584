#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mwstats/errors.hpp"
#include "mwstats/experiments.hpp"

namespace {

using mwstats::ConfigError;
using mwstats::Json;

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

struct RunFlags {
  std::string experiment;
  std::string config_file;
  std::string out;
  std::optional<long long> seed;
  std::optional<long long> threads;
  std::optional<std::string> state;
  std::optional<long long> n_points;
  std::optional<long long> shots;
  std::optional<long long> samples;
  std::optional<double> n_n;
  std::optional<double> gain_db;
  std::optional<std::string> noise_statistics;
  std::optional<double> chain_noise;
  std::vector<std::string> sets;
  bool dry_run = false;
};

/// Section holding the experiment's sweep parameters.
std::string section_of(const std::string& experiment) {
  if (experiment == "ramsey_sweep") return "ramsey";
  if (experiment == "dualpath_sweep") return "dualpath";
  if (experiment == "jpa_sweep") return "jpa";
  if (experiment == "planck_calibration") return "planck";
  if (experiment == "quadrature_check") return "quadrature";
  return "variance_curves";
}

void put(Json& patch, const std::string& dotted, const Json& value) {
  Json* cur = &patch;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    cur = &(*cur)[key];
    start = dot + 1;
  }
}

/// Builds the override patch; flags win over the config file.
Json flag_patch(const RunFlags& f, const std::string& experiment) {
  Json patch = Json::object();
  const std::string sec = section_of(experiment);
  auto scoped = [&](const char* flag, const std::vector<std::string>& allowed, const std::string& key,
                    const Json& value) {
    for (const auto& a : allowed) {
      if (a == sec) {
        put(patch, sec + "." + key, value);
        return;
      }
    }
    throw ConfigError(flag, "not used by experiment " + experiment);
  };
  if (!f.out.empty()) patch["output_dir"] = f.out;
  if (f.seed) patch["seed"] = *f.seed;
  if (f.threads) patch["threads"] = *f.threads;
  if (f.state) scoped("--state", {"ramsey"}, "state", *f.state == "shot_noise" ? "shot" : *f.state);
  if (f.n_points) scoped("--n-points", {"ramsey", "dualpath", "jpa", "planck", "variance_curves"}, "n_points", *f.n_points);
  if (f.shots) scoped("--shots", {"ramsey"}, "shots", *f.shots);
  if (f.samples) scoped("--samples", {"dualpath", "quadrature"}, "samples", *f.samples);
  if (f.n_n) scoped("--n-n", {"jpa"}, "n_n", *f.n_n);
  if (f.gain_db) scoped("--gain-db", {"jpa"}, "gain_db", *f.gain_db);
  if (f.noise_statistics) scoped("--noise-statistics", {"jpa"}, "noise_statistics", *f.noise_statistics);
  if (f.chain_noise) scoped("--chain-noise-photons", {"dualpath", "quadrature"}, "chain_noise_photons", *f.chain_noise);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set " + s, "expected key.path=value");
    const std::string key = s.substr(0, eq), raw = s.substr(eq + 1);
    Json value;
    try {
      value = Json::parse(raw);
    } catch (const std::exception&) {
      value = raw;  // bare strings need no quotes
    }
    put(patch, key, value);
  }
  return patch;
}

int run_command(const RunFlags& f) {
  Json config = mwstats::default_config();
  if (!f.config_file.empty()) mwstats::merge_config(config, mwstats::read_config_file(f.config_file));
  if (!f.experiment.empty()) config["experiment"] = f.experiment;
  const std::string experiment = config["experiment"].get<std::string>();
  mwstats::merge_config(config, flag_patch(f, experiment));
  mwstats::validate_config(config);
  const auto dir = mwstats::resolve_output_dir(config);
  if (f.dry_run) {
    std::cout << config.dump(2) << '\n';
    return 0;
  }
  const auto artifacts = mwstats::run_experiment(config);
  mwstats::write_run(config, artifacts, dir);
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

int report_command(const std::string& dir, bool quiet) {
  const Json report = mwstats::build_report(dir);
  std::ofstream os(std::filesystem::path(dir) / "report.json");
  os << report.dump(2) << '\n';
  if (!quiet) std::cout << mwstats::format_report(report);
  return 0;
}

int schema_command(const std::string& name) {
  if (name.empty()) {
    for (const auto& n : mwstats::schema_names()) std::cout << n << '\n';
    return 0;
  }
  const auto text = mwstats::schema_text(name);
  if (!text) {
    std::cerr << "error: unknown schema '" << name << "'\n";
    return kConfigError;
  }
  std::cout << *text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-statistics simulator and analysis runner"};
  app.set_version_flag("--version", mwstats::version_string());
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run an experiment and write its artifacts");
  run->add_option("experiment", rf.experiment, "variance_curves, ramsey_sweep, dualpath_sweep, jpa_sweep, "
                                               "planck_calibration or quadrature_check");
  run->add_option("--config,-c", rf.config_file, "JSON config file (keys as in `schema config`)");
  run->add_option("--out,-o", rf.out, "Output directory");
  run->add_option("--seed", rf.seed, "Master seed");
  run->add_option("--threads", rf.threads, "Worker thread cap (0 = all cores)");
  run->add_option("--state", rf.state, "Ramsey state: all, thermal, coherent or shot");
  run->add_option("--n-points", rf.n_points, "Number of sweep points");
  run->add_option("--shots", rf.shots, "Ramsey shots per point");
  run->add_option("--samples", rf.samples, "Detection samples per point");
  run->add_option("--n-n", rf.n_n, "JPA added noise photons");
  run->add_option("--gain-db", rf.gain_db, "JPA gain [dB]");
  run->add_option("--noise-statistics", rf.noise_statistics,
                  "JPA noise: all, thermal, classical or classical_commutator_free");
  run->add_option("--chain-noise-photons", rf.chain_noise, "Chain noise photons (dual path)");
  run->add_option("--set", rf.sets, "Override any key, e.g. --set resonator.kappa_x_mhz=8.5");
  run->add_flag("--dry-run", rf.dry_run, "Print the resolved config without running");

  std::string report_dir;
  bool quiet = false;
  auto* report = app.add_subcommand("report", "Check a completed run against the reference values");
  report->add_option("run_dir", report_dir, "Run directory")->required();
  report->add_flag("--quiet,-q", quiet, "Only write report.json");

  std::string schema_name;
  auto* schema = app.add_subcommand("schema", "Print a published JSON schema (no name lists them)");
  schema->add_option("name", schema_name, "Schema name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return run_command(rf);
    if (*report) return report_command(report_dir, quiet);
    return schema_command(schema_name);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mwstats::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}
