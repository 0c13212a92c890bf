#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ipvt/report.hpp"

namespace ipvt {

enum class Experiment {
  volume,
  delays,
  corona_portrait,
  coverage,
  mushroom,
  field,
  tiebreak,
  end_probe,
  nml_probe,
  isometry_check,
};

const std::vector<Experiment>& all_experiments();
/// Command-line spelling, e.g. "end-probe".
std::string experiment_name(Experiment e);
/// Accepts the command-line spelling or its underscore form.
Experiment parse_experiment(std::string_view name);

/// Invalid configuration; carries one diagnostic per offending field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::volume;
  std::uint64_t seed = 1;
  std::map<std::string, std::string> parameters;
  std::filesystem::path output_dir = ".";
  unsigned threads = 1;
  /// Attach wall time to the report (breaks byte-identical reports).
  bool timing = false;
};

/// Typed view over the string parameters of one run. Reads record the
/// resolved value; finish() reports unknown keys and every bad value at once.
class Parameters {
 public:
  explicit Parameters(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  double real(const std::string& key, double fallback, double min, double max, bool open_min = false);
  std::uint64_t count(const std::string& key, std::uint64_t fallback, std::uint64_t min, std::uint64_t max);
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
  bool flag(const std::string& key, bool fallback);

  /// Fails a parameter that passed its own range but not a joint constraint.
  void reject(const std::string& key, const std::string& reason);
  void finish();

  const nlohmann::json& resolved() const { return resolved_; }

 private:
  const std::string* lookup(const std::string& key);

  const std::map<std::string, std::string>& raw_;
  std::set<std::string> used_;
  std::vector<std::string> errors_;
  nlohmann::json resolved_ = nlohmann::json::object();
};

/// Writes `<stem>.csv`, `<stem>.svg` and friends into the output directory
/// and records their names in the report.
class Artifacts {
 public:
  Artifacts(std::filesystem::path dir, std::string stem, TestReport& report);

  std::ofstream open(const std::string& suffix);
  std::filesystem::path path(const std::string& suffix) const { return dir_ / (stem_ + suffix); }
  void record(const std::string& suffix);

 private:
  std::filesystem::path dir_;
  std::string stem_;
  TestReport& report_;
};

/// Runs the experiment, writes its CSV, SVG and `<name>.report.json`, and
/// returns the report.
TestReport run(const ExperimentConfig& config);

/// Entry points behind run(); each reads its parameters, calls finish(),
/// then computes.
namespace experiments {
void volume(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void delays(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void corona_portrait(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void coverage(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void mushroom(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void field(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void tiebreak(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void end_probe(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void nml_probe(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
void isometry_check(const ExperimentConfig&, Parameters&, TestReport&, Artifacts&);
}  // namespace experiments

/// Overlays a JSON configuration file on a command-line configuration. File
/// keys: experiment, seed, threads, output_dir, timing, parameters (object of
/// strings, numbers, booleans or number arrays). The file wins on conflict;
/// one warning is returned per overridden value. `explicit_fields` names the
/// top-level fields the command line set explicitly.
std::vector<std::string> merge_config_file(ExperimentConfig& config, const nlohmann::json& file,
                                           const std::set<std::string>& explicit_fields);

/// CSV row formatting: shortest round-trip representation of each value.
std::string csv_row(std::initializer_list<double> values);

}  // namespace ipvt
