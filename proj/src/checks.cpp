#include "normlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "normlab/parallel.hpp"

namespace nlab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Rng {
 public:
  Rng(std::uint64_t seed, const std::string& stream, std::uint64_t index, int attempt) {
    const std::uint64_t tag = fnv1a(stream);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(attempt)};
    gen_.seed(seq);
  }
  // Uniform in [a, b) from the top 53 bits; independent of the standard
  // library's distribution implementations.
  double uniform(double a, double b) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

std::string coefficient(Rng& rng, double scale) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", rng.uniform(-scale, scale));
  return buf;
}

// Random smooth scalar over x1..xn and the given fiber letter.
std::string random_scalar(Rng& rng, int n, char fiber) {
  std::string out = coefficient(rng, 1.0);
  const int terms = rng.integer(2, 4);
  for (int t = 0; t < terms; ++t) {
    std::string term = coefficient(rng, 1.0);
    const int factors = rng.integer(1, 2);
    for (int f = 0; f < factors; ++f) {
      const bool on_fiber = rng.integer(0, 1) == 1;
      const std::string var = std::string(1, on_fiber ? fiber : 'x') +
                              std::to_string(rng.integer(1, n));
      const int power = rng.integer(1, 3);
      term += "*" + var + (power > 1 ? "^" + std::to_string(power) : "");
    }
    switch (rng.integer(0, 3)) {
      case 0: term = "sin(" + term + ")"; break;
      case 1: term = "exp(0.5*" + term + ")"; break;
      default: break;
    }
    out += "+" + term;
  }
  return out;
}

struct Ctx {
  const SystemFile* file;
  SystemDef system;
  const RunConfig* cfg;
};

using PointRows = std::vector<ReportRow>;

ReportRow row(const std::string& check, const std::string& equation, const PhasePoint& pt,
              double residual, double tolerance, bool decisive = true) {
  ReportRow r;
  r.check = check;
  r.equation = equation;
  r.point = pt.x;
  r.point.insert(r.point.end(), pt.fiber.begin(), pt.fiber.end());
  r.residual = residual;
  r.tolerance = tolerance;
  if (!decisive)
    r.verdict = "info";
  else
    r.verdict = std::isfinite(residual) && residual <= tolerance ? "pass" : "fail";
  return r;
}

template <class Body>
PointRows sampled(const Ctx& ctx, const std::string& check, std::uint64_t index,
                  const Body& body) {
  const int n = ctx.system.n;
  constexpr int kMaxResamples = 10;
  std::string last_error;
  PhasePoint pt;
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    pt = sample_point(*ctx.cfg, n, check, index, attempt);
    try {
      PointRows rows = body(pt);
      for (ReportRow& r : rows) r.resamples = attempt;
      return rows;
    } catch (const DegeneratePoint& e) {
      last_error = e.what();
    } catch (const SingularMetric& e) {
      last_error = e.what();
    } catch (const NonConvergence& e) {
      last_error = e.what();
    } catch (const Error& e) {
      ReportRow r = row(check, "evaluation", pt, NAN, 0.0);
      r.residual.reset();
      r.verdict = "fail";
      r.error = std::string(error_code_name(e.code())) + ": " + e.what();
      r.resamples = attempt;
      return {r};
    }
  }
  ReportRow r = row(check, "sample", pt, NAN, 0.0);
  r.residual.reset();
  r.verdict = "fail";
  r.error = "no usable point after resampling: " + last_error;
  r.resamples = kMaxResamples;
  return {r};
}

PointRows metric_rows(const Ctx& ctx, const PhasePoint& v) {
  const double tol = tolerance_for(*ctx.cfg, "metric");
  const SystemDef& s = ctx.system;
  PointRows rows;
  rows.push_back(row("metric", "metric-duality", v, metric(s, v).deviation, tol));
  const InverseResult inv = legendre_inverse(s, legendre_forward(s, v));
  rows.push_back(row("metric", "legendre-round-trip", v,
                     relative_deviation(inv.v_point.fiber, v.fiber), tol / 10.0));
  return rows;
}

PointRows transport_rows(const Ctx& ctx, const PhasePoint& v, std::uint64_t index) {
  const double tol = tolerance_for(*ctx.cfg, "transport");
  const int n = ctx.system.n;
  Rng rng(ctx.cfg->seed, "transport-field", index, 0);
  PointRows rows;
  for (int upper = 0; upper <= 1; ++upper) {
    const int count = upper == 0 ? 1 : n;
    std::vector<Expression> fv, fp;
    for (int c = 0; c < count; ++c) {
      fv.push_back(parse(random_scalar(rng, n, 'v'), n));
      fp.push_back(parse(random_scalar(rng, n, 'p'), n));
    }
    const TransportDeviations t = transport_identities(ctx.system, v, fv, fp, upper);
    const std::string suffix = upper == 0 ? "-scalar" : "-vector";
    rows.push_back(row("transport", "vertical-from-v" + suffix, v, t.vertical_from_v, tol));
    rows.push_back(row("transport", "vertical-from-p" + suffix, v, t.vertical_from_p, tol));
    rows.push_back(row("transport", "horizontal-from-p" + suffix, v, t.horizontal_from_p, tol));
    rows.push_back(row("transport", "horizontal-from-v" + suffix, v, t.horizontal_from_v, tol));
  }
  return rows;
}

PointRows cross_rows(const Ctx& ctx, const PhasePoint& v) {
  const double tol = tolerance_for(*ctx.cfg, "cross");
  PointRows rows;
  for (const CrossCheck& c : cross_check_all(ctx.system, v, ctx.file->vform))
    rows.push_back(row("cross", std::string("cross-") + field_name(c.field), v, c.deviation, tol));
  const CurvatureRelations cr = curvature_relations(ctx.system, v);
  rows.push_back(row("cross", "curvature-dynamic", v, cr.dynamic, tol / 10.0));
  rows.push_back(row("cross", "curvature-relation", v, cr.curvature, tol / 10.0));
  return rows;
}

PointRows normality_rows(const Ctx& ctx, const PhasePoint& v) {
  const double tol = tolerance_for(*ctx.cfg, "normality");
  const PhasePoint p = legendre_forward(ctx.system, v);
  const NormalityBundle b = prep_fields(ctx.system, p).bundle;
  PointRows rows;
  if (b.n >= 2)
    for (const Residual& r : normality_residuals(b, tol))
      rows.push_back(row("normality", residual_name(r.id), v, r.norm, tol, r.decisive));
  const ProjectorLaws laws = projector_laws(b, p.fiber);
  const double ptol = tol / 10.0;
  rows.push_back(row("normality", "projector-idempotence", v, laws.idempotence, ptol));
  rows.push_back(row("normality", "projector-trace", v, laws.trace, ptol));
  rows.push_back(row("normality", "projector-kills-W", v, laws.kills_W, ptol));
  rows.push_back(row("normality", "projector-kills-p", v, laws.kills_p, ptol));
  return rows;
}

PointRows gauge_rows(const Ctx& ctx, const SystemDef& with_T, const SystemDef& gauged,
                     const SystemDef& free, const PhasePoint& v) {
  const double tol = tolerance_for(*ctx.cfg, "gauge");
  const double rtol = tolerance_for(*ctx.cfg, "normality");
  PointRows rows;
  const GaugePointReport g = gauge_point(with_T, gauged, v, rtol);
  for (const GaugeEntry& e : g.entries) {
    switch (e.kind) {
      case GaugeKind::Invariant:
        rows.push_back(row("gauge", "invariant-" + e.quantity, v, e.deviation, tol / 10.0));
        break;
      case GaugeKind::Rule:
        rows.push_back(row("gauge", e.quantity, v, e.deviation, tol));
        break;
      case GaugeKind::Residual:
        rows.push_back(row("gauge", "residual-" + e.quantity, v, e.deviation, tol / 10.0,
                           e.decisive));
        break;
    }
  }
  const NormalityBundle before = normality_bundle(ctx.system, v);
  const NormalityBundle after = normality_bundle(free, v);
  for (const GaugeEntry& e : residual_invariance(before, after, rtol))
    rows.push_back(row("gauge", "connection-free-" + e.quantity, v, e.deviation, tol / 10.0,
                       e.decisive));
  return rows;
}

CheckResult shift_check(const Ctx& ctx) {
  CheckResult result;
  result.id = "shift";
  if (!ctx.file->shift) {
    result.skipped = true;
    result.note = "no [surface] section";
    return result;
  }
  const double tol = tolerance_for(*ctx.cfg, "shift");
  try {
    const ShiftTrace trace = shift_integrate(ctx.system, *ctx.file->shift);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      ReportRow r;
      r.check = "shift";
      r.equation = i == 0 ? "collinearity-initial" : "collinearity";
      r.point = {trace.times[i]};
      r.residual = trace.deviation[i];
      r.tolerance = i == 0 ? std::min(tol, 1e-10) : tol;
      r.verdict = trace.deviation[i] <= r.tolerance ? "pass" : "fail";
      result.rows.push_back(std::move(r));
    }
  } catch (const Error& e) {
    ReportRow r;
    r.check = "shift";
    r.equation = "integration";
    r.verdict = "fail";
    r.error = std::string(error_code_name(e.code())) + ": " + e.what();
    result.rows.push_back(std::move(r));
  }
  return result;
}

template <class Body>
CheckResult point_check(const Ctx& ctx, const std::string& id, const Body& body) {
  CheckResult result;
  result.id = id;
  std::vector<PointRows> per_point(sz(ctx.cfg->samples));
  parallel_for(per_point.size(), [&](std::size_t i) {
    per_point[i] = sampled(ctx, id, i, [&](const PhasePoint& pt) { return body(pt, i); });
  });
  for (PointRows& rows : per_point)
    for (ReportRow& r : rows) result.rows.push_back(std::move(r));
  return result;
}

ordered_json row_json(const ReportRow& r) {
  ordered_json j;
  j["check"] = r.check;
  j["equation"] = r.equation;
  j["point"] = r.point;
  j["residual"] = r.residual ? ordered_json(*r.residual) : ordered_json(nullptr);
  j["tolerance"] = r.tolerance;
  j["verdict"] = r.verdict;
  if (r.resamples > 0) j["resamples"] = r.resamples;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double default_tolerance(const std::string& check) {
  if (check == "metric") return 1e-9;
  if (check == "transport") return 1e-7;
  if (check == "cross") return 1e-6;
  if (check == "normality") return 1e-8;
  if (check == "gauge") return 1e-6;
  if (check == "shift") return 1e-6;
  throw InvalidArgument("unknown check '" + check + "'");
}

double tolerance_for(const RunConfig& cfg, const std::string& check) {
  const auto it = cfg.tolerances.find(check);
  return it == cfg.tolerances.end() ? default_tolerance(check) : it->second;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.checks.empty()) throw InvalidArgument("no checks selected");
  for (const std::string& c : cfg.checks)
    if (std::find(kCheckIds.begin(), kCheckIds.end(), c) == kCheckIds.end())
      throw InvalidArgument("unknown check '" + c + "'");
  for (const auto& [check, tol] : cfg.tolerances) {
    if (std::find(kCheckIds.begin(), kCheckIds.end(), check) == kCheckIds.end())
      throw InvalidArgument("tolerance for unknown check '" + check + "'");
    if (!(tol > 0.0)) throw InvalidArgument("tolerance for '" + check + "' must be positive");
  }
  if (cfg.samples < 1) throw InvalidArgument("sample count must be at least 1");
  if (!(cfg.x_min < cfg.x_max) || !(cfg.fiber_min < cfg.fiber_max))
    throw InvalidArgument("sampling box is empty");
  const bool needs_gap = std::any_of(cfg.checks.begin(), cfg.checks.end(), [](const auto& c) {
    return c == "cross" || c == "normality" || c == "gauge";
  });
  if (needs_gap && cfg.fiber_min <= 0.0 && cfg.fiber_max >= 0.0)
    throw InvalidArgument("fiber box must exclude a neighbourhood of zero for normality checks");
}

PhasePoint sample_point(const RunConfig& cfg, int n, const std::string& check,
                        std::uint64_t index, int attempt) {
  Rng rng(cfg.seed, check, index, attempt);
  std::vector<double> x(sz(n)), v(sz(n));
  for (double& xi : x) xi = rng.uniform(cfg.x_min, cfg.x_max);
  for (double& vi : v) vi = rng.uniform(cfg.fiber_min, cfg.fiber_max);
  return PhasePoint(std::move(x), std::move(v), Representation::V);
}

std::vector<Expression> random_gauge_tensor(int n, std::uint64_t seed) {
  Rng rng(seed, "gauge-tensor", 0, 0);
  std::vector<Expression> T(sz(n * n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        std::string src = coefficient(rng, 0.3);
        src += "+" + coefficient(rng, 0.3) + "*x" + std::to_string(rng.integer(1, n));
        src += "+" + coefficient(rng, 0.3) + "*v" + std::to_string(rng.integer(1, n));
        src += "+" + coefficient(rng, 0.3) + "*v" + std::to_string(rng.integer(1, n)) + "*v" +
               std::to_string(rng.integer(1, n));
        const Expression e = parse(src, n);
        T[sz((k * n + i) * n + j)] = e;
        T[sz((k * n + j) * n + i)] = e;
      }
  return T;
}

CheckSummary CheckResult::summary() const {
  CheckSummary s;
  double total = 0.0;
  int counted = 0;
  for (const ReportRow& r : rows) {
    if (r.resamples > 0) ++s.resampled;
    if (r.verdict == "info") {
      ++s.info_count;
      continue;
    }
    if (r.verdict == "pass")
      ++s.pass_count;
    else
      ++s.fail_count;
    if (r.residual) {
      s.max = std::max(s.max, *r.residual);
      total += *r.residual;
      ++counted;
    }
  }
  s.mean = counted ? total / counted : 0.0;
  return s;
}

bool CheckResult::passed() const { return skipped || summary().fail_count == 0; }

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

Report run_checks(const SystemFile& file, const RunConfig& cfg) {
  validate_config(cfg);
  Ctx ctx{&file, cfg.connection_free ? connection_free_mode(file.system) : file.system, &cfg};
  const int n = ctx.system.n;

  Report report;
  report.system_name = file.system.name;
  report.n = n;
  report.config = cfg;

  for (const std::string& id : kCheckIds) {
    if (std::find(cfg.checks.begin(), cfg.checks.end(), id) == cfg.checks.end()) continue;
    if (id == "metric") {
      report.checks.push_back(point_check(
          ctx, id, [&](const PhasePoint& v, std::size_t) { return metric_rows(ctx, v); }));
    } else if (id == "transport") {
      report.checks.push_back(point_check(ctx, id, [&](const PhasePoint& v, std::size_t i) {
        return transport_rows(ctx, v, i);
      }));
    } else if (id == "cross") {
      report.checks.push_back(point_check(
          ctx, id, [&](const PhasePoint& v, std::size_t) { return cross_rows(ctx, v); }));
    } else if (id == "normality") {
      report.checks.push_back(point_check(
          ctx, id, [&](const PhasePoint& v, std::size_t) { return normality_rows(ctx, v); }));
    } else if (id == "gauge") {
      SystemDef with_T = ctx.system;
      std::string note;
      if (!with_T.T) {
        with_T.T = random_gauge_tensor(n, cfg.seed);
        note = "random symmetric polynomial gauge tensor";
      }
      const SystemDef gauged = apply_gauge(with_T);
      const SystemDef free = connection_free_mode(ctx.system);
      CheckResult r = point_check(ctx, id, [&](const PhasePoint& v, std::size_t) {
        return gauge_rows(ctx, with_T, gauged, free, v);
      });
      r.note = note;
      report.checks.push_back(std::move(r));
    } else if (id == "shift") {
      report.checks.push_back(shift_check(ctx));
    }
  }
  return report;
}

Report run_checks(const RunConfig& cfg) {
  validate_config(cfg);
  return run_checks(load_system_file(cfg.path), cfg);
}

std::string to_json(const Report& report) {
  ordered_json doc;
  doc["schema"] = 1;
  doc["system"] = {{"name", report.system_name}, {"n", report.n}, {"path", report.config.path}};
  ordered_json tolerances = ordered_json::object();
  for (const std::string& c : report.config.checks)
    tolerances[c] = tolerance_for(report.config, c);
  doc["config"] = {{"checks", report.config.checks},
                   {"samples", report.config.samples},
                   {"seed", report.config.seed},
                   {"tolerances", tolerances},
                   {"box",
                    {{"x", {report.config.x_min, report.config.x_max}},
                     {"fiber", {report.config.fiber_min, report.config.fiber_max}}}},
                   {"mode", report.config.connection_free ? "connection-free" : "connection"}};
  ordered_json checks = ordered_json::array();
  for (const CheckResult& c : report.checks) {
    ordered_json cj;
    cj["id"] = c.id;
    ordered_json rows = ordered_json::array();
    for (const ReportRow& r : c.rows) rows.push_back(row_json(r));
    cj["rows"] = std::move(rows);
    const CheckSummary s = c.summary();
    cj["summary"] = {{"max", s.max},
                     {"mean", s.mean},
                     {"pass_count", s.pass_count},
                     {"fail_count", s.fail_count},
                     {"info_count", s.info_count},
                     {"resampled", s.resampled},
                     {"passed", c.passed()}};
    if (c.skipped) cj["skipped"] = true;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  doc["checks"] = std::move(checks);
  doc["passed"] = report.passed();
  return doc.dump(2) + "\n";
}

std::string to_csv(const Report& report) {
  std::ostringstream out;
  out << "check,equation,point,residual,tolerance,verdict\n";
  for (const CheckResult& c : report.checks)
    for (const ReportRow& r : c.rows) {
      out << r.check << ',' << r.equation << ",\"";
      for (std::size_t i = 0; i < r.point.size(); ++i)
        out << (i ? " " : "") << format_number(r.point[i]);
      out << "\"," << (r.residual ? format_number(*r.residual) : "") << ','
          << format_number(r.tolerance) << ',' << r.verdict << '\n';
    }
  return out.str();
}

std::string render(const Report& report) {
  return report.config.format == ReportFormat::Csv ? to_csv(report) : to_json(report);
}

std::string error_json(const Error& error) {
  ordered_json doc;
  doc["schema"] = 1;
  doc["error"] = {{"code", static_cast<int>(error.code())},
                  {"name", error_code_name(error.code())},
                  {"message", error.what()}};
  return doc.dump(2) + "\n";
}

}  // namespace nlab
