#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "normlab/normlab.h"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

std::string error_record(nl_status status, const std::string& message) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["error"] = {{"code", static_cast<int>(status)},
                  {"name", nl_status_name(status)},
                  {"message", message}};
  return doc.dump(2) + "\n";
}

bool emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return static_cast<bool>(std::cout.flush());
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of normality equations for Newtonian dynamical systems"};
  app.require_subcommand(1);

  CLI::App* check = app.add_subcommand("check", "Run checks on a system file");
  std::string path;
  std::string checks = "metric,transport,cross,normality,gauge,shift";
  int samples = 100;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out_path;
  bool connection_free = false;
  nl_run_config cfg;
  nl_run_config_init(&cfg);

  check->add_option("file", path, "System file")->required();
  check->add_option("--checks", checks,
                    "Comma-separated subset of metric,transport,cross,normality,gauge,shift");
  check->add_option("--samples", samples, "Sample points per check")->check(CLI::PositiveNumber);
  check->add_option("--seed", seed, "Random seed");
  check->add_option("--tol-metric", cfg.tol_metric, "Tolerance for the metric check");
  check->add_option("--tol-transport", cfg.tol_transport, "Tolerance for the transport check");
  check->add_option("--tol-cross", cfg.tol_cross, "Tolerance for the cross-representation check");
  check->add_option("--tol-normality", cfg.tol_normality, "Tolerance for normality residuals");
  check->add_option("--tol-gauge", cfg.tol_gauge, "Tolerance for gauge transformation rules");
  check->add_option("--tol-shift", cfg.tol_shift, "Tolerance for the normal-shift simulation");
  check->add_flag("--connection-free", connection_free, "Replace the connection by zero");
  check->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  check->add_option("--out", out_path, "Write the report to this file");

  CLI11_PARSE(app, argc, argv);

  nl_system* sys = nullptr;
  nl_status status = nl_system_load(path.c_str(), &sys);
  if (status != NL_OK) {
    const std::string msg = nl_last_error_message();
    std::cerr << "normality-lab: " << msg << "\n";
    emit(error_record(status, msg), out_path);
    return kExitError;
  }

  cfg.checks = checks.c_str();
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.connection_free = connection_free ? 1 : 0;
  cfg.format = format == "csv" ? NL_FORMAT_CSV : NL_FORMAT_JSON;

  nl_report* report = nullptr;
  status = nl_run_checks(sys, &cfg, &report);
  nl_system_free(sys);
  if (status != NL_OK) {
    const std::string msg = nl_last_error_message();
    std::cerr << "normality-lab: " << msg << "\n";
    emit(error_record(status, msg), out_path);
    return kExitError;
  }

  const bool passed = nl_report_passed(report) != 0;
  const bool written = emit(nl_report_text(report), out_path);
  nl_report_free(report);
  if (!written) {
    std::cerr << "normality-lab: cannot write report to '" << out_path << "'\n";
    return kExitError;
  }
  return passed ? 0 : kExitFail;
}
