#include <doctest.h>

#include <cmath>
#include <string>

#include "normlab/normlab.h"

namespace {

std::string fixture(const char* name) { return std::string(NLAB_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("load, run and free") {
  nl_system* sys = nullptr;
  REQUIRE(nl_system_load(fixture("identity2.sys").c_str(), &sys) == NL_OK);
  CHECK(nl_system_dimension(sys) == 2);
  nl_run_config cfg;
  nl_run_config_init(&cfg);
  cfg.checks = "metric,normality";
  cfg.samples = 5;
  cfg.seed = 1;
  nl_report* report = nullptr;
  REQUIRE(nl_run_checks(sys, &cfg, &report) == NL_OK);
  CHECK(nl_report_passed(report) == 1);
  CHECK(std::string(nl_report_text(report)).find("\"schema\"") != std::string::npos);
  CHECK(std::string(nl_last_error_message()).empty());
  nl_report_free(report);
  nl_system_free(sys);
}

TEST_CASE("parse from text and CSV output") {
  nl_system* sys = nullptr;
  REQUIRE(nl_system_parse("[system]\nn = 1\n[legendre]\nL1 = \"v1\"\n", &sys) == NL_OK);
  nl_run_config cfg;
  nl_run_config_init(&cfg);
  cfg.checks = "metric";
  cfg.samples = 2;
  cfg.format = NL_FORMAT_CSV;
  nl_report* report = nullptr;
  REQUIRE(nl_run_checks(sys, &cfg, &report) == NL_OK);
  CHECK(std::string(nl_report_text(report)).rfind("check,", 0) == 0);
  nl_report_free(report);
  nl_system_free(sys);
}

TEST_CASE("error codes and messages") {
  nl_system* sys = reinterpret_cast<nl_system*>(0x1);
  CHECK(nl_system_load(fixture("missing.sys").c_str(), &sys) == NL_ERR_FILE);
  CHECK(sys == nullptr);
  CHECK(std::string(nl_last_error_message()).size() > 0);
  CHECK(nl_system_load(fixture("syntax_error.sys").c_str(), &sys) == NL_ERR_SYNTAX);
  CHECK(nl_system_load(fixture("asymmetric.sys").c_str(), &sys) == NL_ERR_VALIDATION);
  CHECK(std::string(nl_last_error_message()).find("connection not symmetric") !=
        std::string::npos);
  CHECK(nl_system_load(nullptr, &sys) == NL_ERR_INVALID_ARGUMENT);
  CHECK(std::string(nl_status_name(NL_ERR_SYNTAX)).size() > 0);
  CHECK(std::string(nl_status_name(NL_OK)) == "ok");

  REQUIRE(nl_system_load(fixture("identity2.sys").c_str(), &sys) == NL_OK);
  nl_run_config cfg;
  nl_run_config_init(&cfg);
  cfg.checks = "metric,unknown";
  nl_report* report = nullptr;
  CHECK(nl_run_checks(sys, &cfg, &report) == NL_ERR_INVALID_ARGUMENT);
  CHECK(report == nullptr);
  nl_system_free(sys);
}

TEST_CASE("point-level entry points") {
  nl_system* sys = nullptr;
  REQUIRE(nl_system_load(fixture("cubic.sys").c_str(), &sys) == NL_OK);
  const double x[3] = {0.1, -0.2, 0.3};
  const double v[3] = {0.8, 1.2, -0.5};
  double p[3], back[3];
  REQUIRE(nl_legendre_forward(sys, x, v, p) == NL_OK);
  for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(v[i] + 0.1 * v[i] * v[i] * v[i]));
  REQUIRE(nl_legendre_inverse(sys, x, p, back) == NL_OK);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));

  double dev[10];
  REQUIRE(nl_cross_check(sys, x, v, dev) == NL_OK);
  for (double d : dev) CHECK(d < 1e-6);
  double res[5];
  REQUIRE(nl_normality_residuals(sys, x, v, res) == NL_OK);
  for (double r : res) CHECK(std::isfinite(r));
  CHECK(nl_cross_check(sys, x, v, nullptr) == NL_ERR_INVALID_ARGUMENT);
  const double zero[3] = {0, 0, 0};
  CHECK(nl_normality_residuals(sys, x, zero, res) == NL_ERR_DEGENERATE_POINT);
  nl_system_free(sys);
}
