#include "ipvt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace ipvt {

namespace {

struct NamedExperiment {
  Experiment id;
  const char* name;
};

constexpr NamedExperiment kExperiments[] = {
    {Experiment::volume, "volume"},
    {Experiment::delays, "delays"},
    {Experiment::corona_portrait, "corona-portrait"},
    {Experiment::coverage, "coverage"},
    {Experiment::mushroom, "mushroom"},
    {Experiment::field, "field"},
    {Experiment::tiebreak, "tiebreak"},
    {Experiment::end_probe, "end-probe"},
    {Experiment::nml_probe, "nml-probe"},
    {Experiment::isometry_check, "isometry-check"},
};

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

// Strict decimal parse; the whole string must be consumed.
bool parse_double(const std::string& text, double& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& e : kExperiments) v.push_back(e.id);
    return v;
  }();
  return all;
}

std::string experiment_name(Experiment e) {
  for (const auto& n : kExperiments)
    if (n.id == e) return n.name;
  throw std::logic_error("unnamed experiment");
}

Experiment parse_experiment(std::string_view name) {
  std::string dashed(name);
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  for (const auto& n : kExperiments)
    if (dashed == n.name) return n.id;
  throw ConfigError({fmt::format("experiment: unknown experiment '{}'", name)});
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::invalid_argument(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

const std::string* Parameters::lookup(const std::string& key) {
  used_.insert(key);
  const auto it = raw_.find(key);
  return it == raw_.end() ? nullptr : &it->second;
}

double Parameters::real(const std::string& key, double fallback, double min, double max, bool open_min) {
  double v = fallback;
  if (const std::string* text = lookup(key)) {
    if (!parse_double(*text, v)) {
      errors_.push_back(fmt::format("{}: '{}' is not a finite number", key, *text));
      return fallback;
    }
  }
  const bool low_ok = open_min ? v > min : v >= min;
  if (!low_ok || v > max)
    errors_.push_back(fmt::format("{}: {} outside {}{}, {}]", key, v, open_min ? "(" : "[", min, max));
  resolved_[key] = v;
  return v;
}

std::uint64_t Parameters::count(const std::string& key, std::uint64_t fallback, std::uint64_t min, std::uint64_t max) {
  std::uint64_t v = fallback;
  if (const std::string* text = lookup(key)) {
    // Accept "1e7" as well as "10000000".
    double d = 0.0;
    if (!parse_double(*text, d) || d < 0.0 || d != std::floor(d) || d > 1.8e19) {
      errors_.push_back(fmt::format("{}: '{}' is not a nonnegative integer", key, *text));
      return fallback;
    }
    v = static_cast<std::uint64_t>(d);
  }
  if (v < min || v > max) errors_.push_back(fmt::format("{}: {} outside [{}, {}]", key, v, min, max));
  resolved_[key] = v;
  return v;
}

std::vector<double> Parameters::reals(const std::string& key, const std::vector<double>& fallback) {
  std::vector<double> v = fallback;
  if (const std::string* text = lookup(key)) {
    v.clear();
    std::size_t start = 0;
    while (start <= text->size()) {
      const std::size_t comma = std::min(text->find(',', start), text->size());
      double d = 0.0;
      if (!parse_double(text->substr(start, comma - start), d)) {
        errors_.push_back(fmt::format("{}: '{}' is not a comma-separated list of numbers", key, *text));
        return fallback;
      }
      v.push_back(d);
      start = comma + 1;
    }
  }
  resolved_[key] = v;
  return v;
}

bool Parameters::flag(const std::string& key, bool fallback) {
  bool v = fallback;
  if (const std::string* text = lookup(key)) {
    if (*text == "true" || *text == "1")
      v = true;
    else if (*text == "false" || *text == "0")
      v = false;
    else
      errors_.push_back(fmt::format("{}: '{}' is not a boolean", key, *text));
  }
  resolved_[key] = v;
  return v;
}

void Parameters::reject(const std::string& key, const std::string& reason) {
  errors_.push_back(fmt::format("{}: {}", key, reason));
}

void Parameters::finish() {
  for (const auto& [key, value] : raw_)
    if (!used_.contains(key)) errors_.push_back(fmt::format("{}: unknown parameter", key));
  if (!errors_.empty()) throw ConfigError(errors_);
}

Artifacts::Artifacts(std::filesystem::path dir, std::string stem, TestReport& report)
    : dir_(std::move(dir)), stem_(std::move(stem)), report_(report) {}

std::ofstream Artifacts::open(const std::string& suffix) {
  std::ofstream f(path(suffix), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path(suffix).string());
  record(suffix);
  return f;
}

void Artifacts::record(const std::string& suffix) { report_.artifacts.push_back(stem_ + suffix); }

std::string csv_row(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ',';
    out += fmt::format("{}", v);
  }
  out += '\n';
  return out;
}

TestReport run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec || !std::filesystem::is_directory(config.output_dir))
    throw std::runtime_error("cannot create output directory " + config.output_dir.string());

  TestReport report;
  report.experiment = experiment_name(config.experiment);
  report.seed = config.seed;
  Parameters params(config.parameters);
  Artifacts artifacts(config.output_dir, report.experiment, report);
  switch (config.experiment) {
    case Experiment::volume: experiments::volume(config, params, report, artifacts); break;
    case Experiment::delays: experiments::delays(config, params, report, artifacts); break;
    case Experiment::corona_portrait: experiments::corona_portrait(config, params, report, artifacts); break;
    case Experiment::coverage: experiments::coverage(config, params, report, artifacts); break;
    case Experiment::mushroom: experiments::mushroom(config, params, report, artifacts); break;
    case Experiment::field: experiments::field(config, params, report, artifacts); break;
    case Experiment::tiebreak: experiments::tiebreak(config, params, report, artifacts); break;
    case Experiment::end_probe: experiments::end_probe(config, params, report, artifacts); break;
    case Experiment::nml_probe: experiments::nml_probe(config, params, report, artifacts); break;
    case Experiment::isometry_check: experiments::isometry_check(config, params, report, artifacts); break;
  }
  report.parameters = params.resolved();
  if (config.timing)
    report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  artifacts.record(".report.json");
  std::ofstream f(artifacts.path(".report.json"), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + artifacts.path(".report.json").string());
  f << report.to_json().dump(2) << '\n';
  return report;
}

}  // namespace ipvt

namespace ipvt {

namespace {

std::string parameter_text(const std::string& key, const nlohmann::json& v, std::vector<std::string>& errors) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& x : v) {
      if (!x.is_number()) {
        errors.push_back(fmt::format("parameters.{}: arrays must hold numbers", key));
        return {};
      }
      out += (out.empty() ? "" : ",") + x.dump();
    }
    return out;
  }
  errors.push_back(fmt::format("parameters.{}: expected string, number, boolean or number array", key));
  return {};
}

}  // namespace

std::vector<std::string> merge_config_file(ExperimentConfig& config, const nlohmann::json& file,
                                           const std::set<std::string>& explicit_fields) {
  if (!file.is_object()) throw ConfigError({"config file: top level must be a JSON object"});
  std::vector<std::string> warnings, errors;
  auto conflict = [&](const std::string& field, const std::string& cli, const std::string& from_file) {
    if (explicit_fields.contains(field) && cli != from_file)
      warnings.push_back(fmt::format("{}: config file value '{}' overrides command-line value '{}'", field, from_file, cli));
  };
  for (const auto& [key, v] : file.items()) {
    if (key == "experiment") {
      if (!v.is_string()) {
        errors.push_back("experiment: expected a string");
        continue;
      }
      const Experiment e = parse_experiment(v.get<std::string>());
      conflict("experiment", experiment_name(config.experiment), experiment_name(e));
      config.experiment = e;
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) {
        errors.push_back("seed: expected a nonnegative integer");
        continue;
      }
      conflict("seed", std::to_string(config.seed), v.dump());
      config.seed = v.get<std::uint64_t>();
    } else if (key == "threads") {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 1 || v.get<std::uint64_t>() > 4096) {
        errors.push_back("threads: expected an integer in [1, 4096]");
        continue;
      }
      conflict("threads", std::to_string(config.threads), v.dump());
      config.threads = v.get<unsigned>();
    } else if (key == "output_dir") {
      if (!v.is_string()) {
        errors.push_back("output_dir: expected a string");
        continue;
      }
      conflict("output_dir", config.output_dir.string(), v.get<std::string>());
      config.output_dir = v.get<std::string>();
    } else if (key == "timing") {
      if (!v.is_boolean()) {
        errors.push_back("timing: expected a boolean");
        continue;
      }
      config.timing = v.get<bool>();
    } else if (key == "parameters") {
      if (!v.is_object()) {
        errors.push_back("parameters: expected an object");
        continue;
      }
      for (const auto& [name, value] : v.items()) {
        const std::string text = parameter_text(name, value, errors);
        const auto it = config.parameters.find(name);
        if (it != config.parameters.end() && it->second != text)
          warnings.push_back(
              fmt::format("{}: config file value '{}' overrides command-line value '{}'", name, text, it->second));
        config.parameters[name] = text;
      }
    } else {
      errors.push_back(fmt::format("{}: unknown config file key", key));
    }
  }
  if (!errors.empty()) throw ConfigError(errors);
  return warnings;
}

}  // namespace ipvt
