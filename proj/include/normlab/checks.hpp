#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "normlab/sysfile.hpp"

namespace nlab {

inline const std::vector<std::string> kCheckIds = {"metric", "transport", "cross",
                                                   "normality", "gauge", "shift"};

enum class ReportFormat { Json, Csv };

struct RunConfig {
  std::string path;
  std::vector<std::string> checks = kCheckIds;
  int samples = 100;
  std::uint64_t seed = 0;
  // Overrides of the per-check tolerances, keyed by check id.
  std::map<std::string, double> tolerances;
  double x_min = -1.0;
  double x_max = 1.0;
  double fiber_min = 0.5;
  double fiber_max = 1.5;
  ReportFormat format = ReportFormat::Json;
  bool connection_free = false;
};

double default_tolerance(const std::string& check);
double tolerance_for(const RunConfig& cfg, const std::string& check);

// Throws InvalidArgument on unknown checks, samples < 1, non-positive
// tolerances, empty boxes, or a fiber box touching the origin while a
// normality-type check is selected.
void validate_config(const RunConfig& cfg);

struct ReportRow {
  std::string check;
  std::string equation;
  std::vector<double> point;  // x1..xn then fiber, or [t] for the shift check
  std::optional<double> residual;
  double tolerance = 0.0;
  std::string verdict;  // "pass", "fail" or "info" (non-decisive)
  int resamples = 0;
  std::string error;
};

struct CheckSummary {
  double max = 0.0;
  double mean = 0.0;
  int pass_count = 0;
  int fail_count = 0;
  int info_count = 0;
  int resampled = 0;
};

struct CheckResult {
  std::string id;
  std::vector<ReportRow> rows;
  bool skipped = false;
  std::string note;
  CheckSummary summary() const;
  bool passed() const;
};

struct Report {
  std::string system_name;
  int n = 0;
  RunConfig config;
  std::vector<CheckResult> checks;
  bool passed() const;
};

Report run_checks(const SystemFile& file, const RunConfig& cfg);
Report run_checks(const RunConfig& cfg);  // loads cfg.path

std::string to_json(const Report& report);
std::string to_csv(const Report& report);
std::string render(const Report& report);  // in the configured format
std::string error_json(const Error& error);

// Deterministic random sample in the configured box.
PhasePoint sample_point(const RunConfig& cfg, int n, const std::string& check,
                        std::uint64_t index, int attempt);

// Random symmetric polynomial gauge tensor derived from the seed.
std::vector<Expression> random_gauge_tensor(int n, std::uint64_t seed);

}  // namespace nlab
