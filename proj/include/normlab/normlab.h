#ifndef NORMLAB_H
#define NORMLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(NLAB_BUILDING_LIBRARY)
#define NLAB_API __attribute__((visibility("default")))
#else
#define NLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nl_status {
  NL_OK = 0,
  NL_ERR_SYNTAX = 1,
  NL_ERR_DIMENSION = 2,
  NL_ERR_MIXED_REPRESENTATION = 3,
  NL_ERR_EVAL = 4,
  NL_ERR_SINGULAR_METRIC = 5,
  NL_ERR_NON_CONVERGENCE = 6,
  NL_ERR_DEGENERATE_POINT = 7,
  NL_ERR_MISSING_JETS = 8,
  NL_ERR_MISSING_GAUGE_TENSOR = 9,
  NL_ERR_ASYMMETRIC_GAUGE = 10,
  NL_ERR_DEGENERATE_SURFACE = 11,
  NL_ERR_INTEGRATION_FAILURE = 12,
  NL_ERR_FILE = 13,
  NL_ERR_VALIDATION = 14,
  NL_ERR_INVALID_ARGUMENT = 15,
  NL_ERR_INTERNAL = 99
} nl_status;

typedef struct nl_system nl_system;
typedef struct nl_report nl_report;

typedef enum nl_format { NL_FORMAT_JSON = 0, NL_FORMAT_CSV = 1 } nl_format;

typedef struct nl_run_config {
  const char* checks;  /* comma separated; NULL selects all */
  int samples;         /* <= 0 selects the default of 100 */
  uint64_t seed;
  double tol_metric;   /* <= 0 keeps the default */
  double tol_transport;
  double tol_cross;
  double tol_normality;
  double tol_gauge;
  double tol_shift;
  int connection_free;
  nl_format format;
} nl_run_config;

/* Message of the last failed call on this thread; empty after success. */
NLAB_API const char* nl_last_error_message(void);
NLAB_API const char* nl_status_name(nl_status status);

NLAB_API void nl_run_config_init(nl_run_config* cfg);

NLAB_API nl_status nl_system_load(const char* path, nl_system** out);
NLAB_API nl_status nl_system_parse(const char* text, nl_system** out);
NLAB_API void nl_system_free(nl_system* sys);
NLAB_API int nl_system_dimension(const nl_system* sys);

NLAB_API nl_status nl_run_checks(const nl_system* sys, const nl_run_config* cfg,
                                 nl_report** out);
/* Rendered report; owned by the report. */
NLAB_API const char* nl_report_text(const nl_report* report);
NLAB_API int nl_report_passed(const nl_report* report);
NLAB_API void nl_report_free(nl_report* report);

/* Point-level entry points. Arrays have n entries unless stated. */
NLAB_API nl_status nl_legendre_forward(const nl_system* sys, const double* x, const double* v,
                                       double* p_out);
NLAB_API nl_status nl_legendre_inverse(const nl_system* sys, const double* x, const double* p,
                                       double* v_out);
/* Deviations of the ten fields W, Omega, P, U, alpha, beta, eta, A, B, C. */
NLAB_API nl_status nl_cross_check(const nl_system* sys, const double* x, const double* v,
                                  double deviations_out[10]);
/* weak-alpha, weak-eta, addl-A, addl-B, addl-C at the p-point λ(x, v). */
NLAB_API nl_status nl_normality_residuals(const nl_system* sys, const double* x,
                                          const double* v, double residuals_out[5]);

#ifdef __cplusplus
}
#endif

#endif
