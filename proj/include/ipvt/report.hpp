#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ipvt/stats.hpp"

namespace ipvt {

inline constexpr int kReportSchemaVersion = 1;

/// One pass/fail decision with the value it was based on.
struct ReportCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Statistics, seeds and verdicts of one experiment run. Pure function of the
/// configuration unless wall time is attached.
struct TestReport {
  std::string experiment;
  std::uint64_t seed = 0;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json statistics = nlohmann::json::object();
  std::vector<ReportCheck> checks;
  /// Checks that are reported but do not decide the verdict.
  std::vector<ReportCheck> diagnostics;
  std::vector<std::string> artifacts;
  std::optional<double> wall_time_seconds;

  void check(std::string name, bool passed, std::string detail = {});
  void diagnose(std::string name, bool passed, std::string detail = {});
  bool passed() const;

  nlohmann::json to_json() const;
};

/// {"mean", "std_error", "n", "ci95": [lo, hi]}
nlohmann::json estimate_json(const stats::Estimate& e);
nlohmann::json ks_json(const stats::KsResult& ks);

}  // namespace ipvt
