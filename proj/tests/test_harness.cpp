#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipvt/experiment.hpp"
#include "ipvt/svg.hpp"

using namespace ipvt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ipvt_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Experiments, NamesRoundTrip) {
  EXPECT_EQ(all_experiments().size(), 10u);
  for (Experiment e : all_experiments()) EXPECT_EQ(parse_experiment(experiment_name(e)), e);
  EXPECT_EQ(parse_experiment("end_probe"), Experiment::end_probe);
  EXPECT_THROW(parse_experiment("nope"), ConfigError);
}

TEST(Parameters, TypedReadsAndDiagnostics) {
  const std::map<std::string, std::string> raw{{"n", "1e7"}, {"x", "0.25"}, {"list", "1,2.5"}, {"flag", "false"}};
  Parameters p(raw);
  EXPECT_EQ(p.count("n", 1, 1, 100000000), 10000000u);
  EXPECT_EQ(p.real("x", 1.0, 0.0, 1.0), 0.25);
  EXPECT_EQ(p.reals("list", {}), (std::vector<double>{1.0, 2.5}));
  EXPECT_FALSE(p.flag("flag", true));
  EXPECT_EQ(p.real("absent", 3.0, 0.0, 5.0), 3.0);
  EXPECT_NO_THROW(p.finish());
  EXPECT_EQ(p.resolved()["absent"], 3.0);

  const std::map<std::string, std::string> bad{{"n", "2.5"}, {"x", "abc"}, {"y", "7"}, {"typo", "1"}};
  Parameters q(bad);
  q.count("n", 1, 1, 10);
  q.real("x", 1.0, 0.0, 1.0);
  q.real("y", 1.0, 0.0, 5.0);
  try {
    q.finish();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.diagnostics().size(), 4u);
  }
}

TEST(ConfigFile, FileWinsWithWarnings) {
  ExperimentConfig c;
  c.experiment = Experiment::volume;
  c.seed = 5;
  c.parameters = {{"tolerance", "1e-9"}, {"r_max", "4"}};
  const auto file = nlohmann::json::parse(R"({"seed": 9, "threads": 2, "parameters": {"tolerance": 1e-7, "radii": [1, 2]}})");
  const auto warnings = merge_config_file(c, file, {"seed"});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(c.parameters["tolerance"], "1e-07");
  EXPECT_EQ(c.parameters["radii"], "1,2");
  EXPECT_EQ(c.parameters["r_max"], "4");
  EXPECT_EQ(warnings.size(), 2u);
  // Threads were not set on the command line, so no warning for them.
  for (const auto& w : warnings) EXPECT_EQ(w.find("threads"), std::string::npos);
}

TEST(ConfigFile, RejectsBadFields) {
  ExperimentConfig c;
  EXPECT_THROW(merge_config_file(c, nlohmann::json::parse(R"({"sed": 1})"), {}), ConfigError);
  EXPECT_THROW(merge_config_file(c, nlohmann::json::parse(R"({"seed": -1})"), {}), ConfigError);
  EXPECT_THROW(merge_config_file(c, nlohmann::json::parse(R"({"experiment": "bogus"})"), {}), ConfigError);
  EXPECT_THROW(merge_config_file(c, nlohmann::json::parse("[1]"), {}), ConfigError);
}

TEST(Run, WritesArtifactsAndVersionedReport) {
  ExperimentConfig c;
  c.experiment = Experiment::volume;
  c.output_dir = fresh_dir("volume");
  const TestReport r = run(c);
  EXPECT_TRUE(r.passed());
  for (const char* f : {"volume.csv", "volume.svg", "volume.report.json"}) EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  const auto j = nlohmann::json::parse(slurp(c.output_dir / "volume.report.json"));
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["experiment"], "volume");
  EXPECT_FALSE(j.contains("wall_time_seconds"));
  EXPECT_EQ(slurp(c.output_dir / "volume.csv").substr(0, 37), "r,closed_form,quadrature,relative_err");
}

TEST(Run, RejectsInvalidParametersAndPaths) {
  ExperimentConfig c;
  c.experiment = Experiment::tiebreak;
  c.output_dir = fresh_dir("bad");
  c.parameters = {{"n", "-3"}};
  EXPECT_THROW(run(c), ConfigError);
  c.parameters.clear();
  const fs::path blocker = fresh_dir("blocker");
  std::ofstream(blocker) << "file";
  c.output_dir = blocker / "sub";
  EXPECT_THROW(run(c), std::runtime_error);
  fs::remove(blocker);
}

TEST(Run, IdenticalConfigGivesIdenticalBytes) {
  for (Experiment e : {Experiment::tiebreak, Experiment::mushroom, Experiment::corona_portrait}) {
    ExperimentConfig c;
    c.experiment = e;
    c.seed = 77;
    if (e == Experiment::tiebreak) c.parameters = {{"n", "1e5"}, {"tolerance", "0.01"}};
    if (e == Experiment::mushroom) c.parameters = {{"configs", "20"}};
    c.output_dir = fresh_dir("det_a");
    run(c);
    const fs::path a = c.output_dir;
    c.output_dir = fresh_dir("det_b");
    c.threads = 3;
    run(c);
    const std::string name = experiment_name(e);
    for (const char* suffix : {".csv", ".report.json", ".svg"})
      EXPECT_EQ(slurp(a / (name + suffix)), slurp(c.output_dir / (name + suffix))) << name << suffix;
  }
}

TEST(Run, TimingIsOptIn) {
  ExperimentConfig c;
  c.experiment = Experiment::volume;
  c.output_dir = fresh_dir("timing");
  c.timing = true;
  EXPECT_TRUE(run(c).wall_time_seconds.has_value());
  EXPECT_TRUE(nlohmann::json::parse(slurp(c.output_dir / "volume.report.json")).contains("wall_time_seconds"));
}

TEST(Report, ChecksDecideVerdictDiagnosticsDoNot) {
  TestReport r;
  r.check("a", true);
  r.diagnose("b", false);
  EXPECT_TRUE(r.passed());
  r.check("c", false, "why");
  EXPECT_FALSE(r.passed());
  const auto j = r.to_json();
  EXPECT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["passed"], false);
  const auto e = estimate_json(stats::Estimate{0.5, 0.1, 10});
  EXPECT_EQ(e["n"], 10);
  EXPECT_NEAR(e["ci95"][0].get<double>(), 0.5 - 1.96 * 0.1, 1e-3);
}

TEST(Svg, DeterministicAndEscaped) {
  SvgPlot p("a < b & c", {0, 1, false, "x"}, {1, 100, true, "y"});
  const std::vector<double> xs{0, 0.5, 1}, ys{1, 10, 100};
  p.polyline(xs, ys, "#000");
  const std::string s = p.str();
  EXPECT_EQ(s, p.str());
  EXPECT_NE(s.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
}

TEST(CsvRow, ShortestRoundTrip) {
  EXPECT_EQ(csv_row({1.0, 0.1, 1e-20}), "1,0.1,1e-20\n");
}
