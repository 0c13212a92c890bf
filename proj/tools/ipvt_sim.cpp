// Command-line front end: one subcommand per experiment.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "ipvt/experiment.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFail = 2;

void print_summary(const ipvt::TestReport& report, const std::filesystem::path& dir) {
  std::cout << fmt::format("experiment {} (seed {})\n", report.experiment, report.seed);
  for (const auto& c : report.checks)
    std::cout << fmt::format("  [{}] {}{}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail.empty() ? "" : ": " + c.detail);
  for (const auto& c : report.diagnostics)
    std::cout << fmt::format("  [{}] (diagnostic) {}{}\n", c.passed ? "ok" : "note", c.name,
                             c.detail.empty() ? "" : ": " + c.detail);
  for (const auto& a : report.artifacts) std::cout << "  wrote " << (dir / a).string() << "\n";
  std::cout << (report.passed() ? "PASS\n" : "FAIL\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for the Poisson-Voronoi tessellation of H2 x H2 with the L1 metric"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::uint64_t seed = 1;
  std::string out = ".";
  unsigned threads = 1;
  std::string config_file;
  bool timing = false;
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed");
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 4096u));
  app.add_option("--config", config_file, "JSON configuration file; its values win on conflict")->check(CLI::ExistingFile);
  app.add_flag("--timing", timing, "record wall time in the report (breaks byte-identical reports)");

  std::map<CLI::App*, ipvt::Experiment> subcommands;
  std::vector<std::string> assignments;
  for (ipvt::Experiment e : ipvt::all_experiments()) {
    auto* sub = app.add_subcommand(ipvt::experiment_name(e), "run the " + ipvt::experiment_name(e) + " experiment");
    sub->add_option("params", assignments, "experiment parameters as key=value");
    subcommands[sub] = e;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    ipvt::ExperimentConfig config;
    std::set<std::string> explicit_fields;
    bool have_experiment = false;
    for (const auto& [sub, e] : subcommands)
      if (sub->parsed()) {
        config.experiment = e;
        have_experiment = true;
        explicit_fields.insert("experiment");
      }
    config.seed = seed;
    config.output_dir = out;
    config.threads = threads;
    config.timing = timing;
    if (seed_opt->count()) explicit_fields.insert("seed");
    if (out_opt->count()) explicit_fields.insert("output_dir");
    if (threads_opt->count()) explicit_fields.insert("threads");

    std::vector<std::string> errors;
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos || eq == 0) {
        errors.push_back(fmt::format("'{}': expected key=value", a));
        continue;
      }
      config.parameters[a.substr(0, eq)] = a.substr(eq + 1);
    }
    if (!errors.empty()) throw ipvt::ConfigError(errors);

    if (!config_file.empty()) {
      std::ifstream f(config_file);
      nlohmann::json file;
      try {
        file = nlohmann::json::parse(f);
      } catch (const nlohmann::json::parse_error& e) {
        throw ipvt::ConfigError({fmt::format("{}: {}", config_file, e.what())});
      }
      have_experiment = have_experiment || file.contains("experiment");
      for (const auto& w : ipvt::merge_config_file(config, file, explicit_fields)) std::cerr << "warning: " << w << "\n";
    }
    if (!have_experiment) throw ipvt::ConfigError({"experiment: give a subcommand or an experiment key in --config"});

    const ipvt::TestReport report = ipvt::run(config);
    print_summary(report, config.output_dir);
    return report.passed() ? kExitPass : kExitFail;
  } catch (const ipvt::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
