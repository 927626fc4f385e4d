#ifndef LSFEM_H
#define LSFEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsfemStatus {
  LSFEM_STATUS_OK = 0,
  LSFEM_STATUS_NULL_POINTER = 1,
  LSFEM_STATUS_INVALID_STRING = 2,
  LSFEM_STATUS_INVALID_ARGUMENT = 3,
  LSFEM_STATUS_INDEX_OUT_OF_RANGE = 4,
  LSFEM_STATUS_SOLVER_FAILURE = 5,
  LSFEM_STATUS_NUMERICAL = 6,
  LSFEM_STATUS_IO = 7,
  LSFEM_STATUS_PANIC = 8,
} LsfemStatus;

/**
 * Study configuration. Starts from the library defaults.
 */
typedef struct LsfemConfig LsfemConfig;

/**
 * Result of [`lsfem_run`].
 */
typedef struct LsfemReport LsfemReport;

/**
 * One level of a report. Values that do not apply are NaN.
 */
typedef struct LsfemRow {
  size_t level;
  size_t dofs;
  size_t nodes;
  double hmax;
  double ls;
  double eta;
  double l2u;
  double h1u;
  double l2sigma;
  double wbh2a;
  double wbh2;
  /**
   * rates of ls, l2u, h1u, l2sigma, wbh2A, wbh2
   */
  double rates[6];
} LsfemRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *lsfem_last_error_message(void);

/**
 * Static, NUL-terminated version string.
 */
const char *lsfem_version(void);

struct LsfemConfig *lsfem_config_new(void);

/**
 * # Safety
 * `config` must come from [`lsfem_config_new`] and not be used afterwards.
 */
void lsfem_config_free(struct LsfemConfig *config);

/**
 * Sets one option. Keys match the long flags of the `lsfem` binary:
 * benchmark, formulation, degree, mode, levels, theta, tol, solver,
 * max-dofs, rate-window, out-csv, out-svg.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum LsfemStatus lsfem_config_set(struct LsfemConfig *config, const char *key, const char *value);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum LsfemStatus lsfem_config_validate(const struct LsfemConfig *config);

/**
 * Runs the configured study. On success `*out` receives a report handle.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum LsfemStatus lsfem_run(const struct LsfemConfig *config, struct LsfemReport **out);

/**
 * # Safety
 * `report` must come from [`lsfem_run`] and not be used afterwards.
 */
void lsfem_report_free(struct LsfemReport *report);

/**
 * Number of levels in the report; 0 for a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
size_t lsfem_report_len(const struct LsfemReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum LsfemStatus lsfem_report_row(const struct LsfemReport *report,
                                  size_t index,
                                  struct LsfemRow *out);

/**
 * Writes the report as CSV to `path`.
 *
 * # Safety
 * `report` must be a live handle and `path` a NUL-terminated string.
 */
enum LsfemStatus lsfem_report_write_csv(const struct LsfemReport *report, const char *path);

/**
 * Fitted convergence rate of `n` error values against `n` scale values
 * (mesh sizes when `adaptive` is false, unknown counts otherwise).
 *
 * # Safety
 * `values` and `scale` must point to `n` doubles; `out` must be valid.
 */
enum LsfemStatus lsfem_fit_rate(const double *values,
                                const double *scale,
                                size_t n,
                                bool adaptive,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LSFEM_H */
