#include "ipvt/report.hpp"

#include <algorithm>

namespace ipvt {

void TestReport::check(std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed, std::move(detail)});
}

void TestReport::diagnose(std::string name, bool passed, std::string detail) {
  diagnostics.push_back({std::move(name), passed, std::move(detail)});
}

bool TestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ReportCheck& c) { return c.passed; });
}

namespace {

nlohmann::json checks_json(const std::vector<ReportCheck>& list) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : list) out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return out;
}

}  // namespace

nlohmann::json TestReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["parameters"] = parameters;
  j["statistics"] = statistics;
  j["checks"] = checks_json(checks);
  j["diagnostics"] = checks_json(diagnostics);
  j["passed"] = passed();
  j["artifacts"] = artifacts;
  if (wall_time_seconds) j["wall_time_seconds"] = *wall_time_seconds;
  return j;
}

nlohmann::json estimate_json(const stats::Estimate& e) {
  return {{"mean", e.mean},
          {"std_error", e.std_error},
          {"n", e.n},
          {"ci95", {e.mean - 1.96 * e.std_error, e.mean + 1.96 * e.std_error}}};
}

nlohmann::json ks_json(const stats::KsResult& ks) {
  return {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"n", ks.n}};
}

}  // namespace ipvt
