#include "normlab/normlab.h"

#include <sstream>
#include <string>

#include "normlab/checks.hpp"

struct nl_system {
  nlab::SystemFile file;
  std::string path;
};

struct nl_report {
  nlab::Report report;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

nl_status fail(nl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Body>
nl_status guarded(const Body& body) {
  try {
    g_last_error.clear();
    body();
    return NL_OK;
  } catch (const nlab::Error& e) {
    return fail(static_cast<nl_status>(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(NL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NL_ERR_INTERNAL, "unknown error");
  }
}

std::vector<double> copy(const double* a, int n) { return std::vector<double>(a, a + n); }

nlab::PhasePoint v_point(const nl_system* sys, const double* x, const double* v) {
  const int n = sys->file.system.n;
  return nlab::PhasePoint(copy(x, n), copy(v, n), nlab::Representation::V);
}

}  // namespace

extern "C" {

const char* nl_last_error_message(void) { return g_last_error.c_str(); }

const char* nl_status_name(nl_status status) {
  return status == NL_OK ? "ok" : nlab::error_code_name(static_cast<nlab::ErrorCode>(status));
}

void nl_run_config_init(nl_run_config* cfg) {
  if (!cfg) return;
  *cfg = nl_run_config{};
  cfg->samples = 100;
  cfg->format = NL_FORMAT_JSON;
}

nl_status nl_system_load(const char* path, nl_system** out) {
  if (!path || !out) return fail(NL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new nl_system{nlab::load_system_file(path), path}; });
}

nl_status nl_system_parse(const char* text, nl_system** out) {
  if (!text || !out) return fail(NL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new nl_system{nlab::parse_system_text(text), {}}; });
}

void nl_system_free(nl_system* sys) { delete sys; }

int nl_system_dimension(const nl_system* sys) { return sys ? sys->file.system.n : 0; }

nl_status nl_run_checks(const nl_system* sys, const nl_run_config* cfg, nl_report** out) {
  if (!sys || !out) return fail(NL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  nl_run_config defaults;
  nl_run_config_init(&defaults);
  const nl_run_config& c = cfg ? *cfg : defaults;
  return guarded([&] {
    nlab::RunConfig rc;
    rc.path = sys->path;
    if (c.checks) {
      rc.checks.clear();
      std::stringstream ss(c.checks);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) rc.checks.push_back(item);
    }
    if (c.samples > 0) rc.samples = c.samples;
    rc.seed = c.seed;
    const std::pair<const char*, double> tols[] = {
        {"metric", c.tol_metric}, {"transport", c.tol_transport}, {"cross", c.tol_cross},
        {"normality", c.tol_normality}, {"gauge", c.tol_gauge}, {"shift", c.tol_shift}};
    for (const auto& [id, tol] : tols)
      if (tol > 0.0) rc.tolerances[id] = tol;
    rc.connection_free = c.connection_free != 0;
    rc.format = c.format == NL_FORMAT_CSV ? nlab::ReportFormat::Csv : nlab::ReportFormat::Json;
    auto* report = new nl_report{nlab::run_checks(sys->file, rc), {}};
    report->text = nlab::render(report->report);
    *out = report;
  });
}

const char* nl_report_text(const nl_report* report) { return report ? report->text.c_str() : ""; }

int nl_report_passed(const nl_report* report) { return report && report->report.passed(); }

void nl_report_free(nl_report* report) { delete report; }

nl_status nl_legendre_forward(const nl_system* sys, const double* x, const double* v,
                              double* p_out) {
  if (!sys || !x || !v || !p_out) return fail(NL_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const nlab::PhasePoint p = nlab::legendre_forward(sys->file.system, v_point(sys, x, v));
    std::copy(p.fiber.begin(), p.fiber.end(), p_out);
  });
}

nl_status nl_legendre_inverse(const nl_system* sys, const double* x, const double* p,
                              double* v_out) {
  if (!sys || !x || !p || !v_out) return fail(NL_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const int n = sys->file.system.n;
    const nlab::PhasePoint pp(copy(x, n), copy(p, n), nlab::Representation::P);
    const nlab::InverseResult inv = nlab::legendre_inverse(sys->file.system, pp);
    std::copy(inv.v_point.fiber.begin(), inv.v_point.fiber.end(), v_out);
  });
}

nl_status nl_cross_check(const nl_system* sys, const double* x, const double* v,
                         double deviations_out[10]) {
  if (!sys || !x || !v || !deviations_out) return fail(NL_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto checks =
        nlab::cross_check_all(sys->file.system, v_point(sys, x, v), sys->file.vform);
    for (std::size_t i = 0; i < checks.size(); ++i) deviations_out[i] = checks[i].deviation;
  });
}

nl_status nl_normality_residuals(const nl_system* sys, const double* x, const double* v,
                                 double residuals_out[5]) {
  if (!sys || !x || !v || !residuals_out) return fail(NL_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const nlab::PhasePoint p = nlab::legendre_forward(sys->file.system, v_point(sys, x, v));
    const auto res = nlab::normality_residuals(sys->file.system, p);
    for (std::size_t i = 0; i < res.size(); ++i) residuals_out[i] = res[i].norm;
  });
}

}  // extern "C"
