#ifndef TWOSOURCE_H
#define TWOSOURCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TS_SCENARIO_ASYMMETRIC 0

#define TS_SCENARIO_SYMMETRIC 1

typedef enum ts_status {
  TS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TS_STATUS_NULL_POINTER = 1,
  /**
   * A parameter was outside its domain.
   */
  TS_STATUS_DOMAIN = 2,
  /**
   * The request exceeds a size limit.
   */
  TS_STATUS_CAPACITY = 3,
  /**
   * A numerical routine failed.
   */
  TS_STATUS_NUMERIC = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  TS_STATUS_PANIC = 5,
} ts_status;

/**
 * Opaque result of a bound computation.
 */
typedef struct ts_bound_report ts_bound_report;

typedef struct ts_chernoff_t {
  double xi;
  double s_star;
  double overlap_at_s_star;
  bool minimum_at_zero;
} ts_chernoff_t;

typedef struct ts_protocol_t {
  double alpha;
  double beta;
  double p_err;
  double saturation;
  double exponent;
} ts_protocol_t;

typedef struct ts_simulation_t {
  uint64_t wrong_h1;
  uint64_t wrong_h2;
  double p_hat;
  /**
   * Binomial standard error of `p_hat` (`stderr` is a C macro).
   */
  double std_error;
  double p_theory;
} ts_simulation_t;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread (empty after a success).
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *ts_last_error(void);

/**
 * Optimal error after `m` detections. On success `*out` owns a new report.
 */
enum ts_status ts_bound(uint32_t scenario_code,
                        double k,
                        double q,
                        double p1,
                        uint32_t m,
                        struct ts_bound_report **out);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `report` must come from `ts_bound` and not have been freed.
 */
void ts_bound_report_free(struct ts_bound_report *report);

/**
 * Optimal error; NaN for a null report.
 *
 * # Safety
 * `report` must be null or a live report from `ts_bound`.
 */
double ts_bound_report_e_min(const struct ts_bound_report *report);

/**
 * Error of guessing from the priors alone; NaN for a null report.
 *
 * # Safety
 * `report` must be null or a live report from `ts_bound`.
 */
double ts_bound_report_e_guess(const struct ts_bound_report *report);

/**
 * Guessing error over optimal error (`INFINITY` when the optimum is zero);
 * NaN for a null report.
 *
 * # Safety
 * `report` must be null or a live report from `ts_bound`.
 */
double ts_bound_report_advantage(const struct ts_bound_report *report);

/**
 * Whether guessing is already optimal; false for a null report.
 *
 * # Safety
 * `report` must be null or a live report from `ts_bound`.
 */
bool ts_bound_report_forbidden(const struct ts_bound_report *report);

/**
 * Detections per decision; 0 for a null report.
 *
 * # Safety
 * `report` must be null or a live report from `ts_bound`.
 */
uint32_t ts_bound_report_m(const struct ts_bound_report *report);

/**
 * Numerically minimized Chernoff exponent.
 */
enum ts_status ts_chernoff(uint32_t scenario_code, double k, double q, struct ts_chernoff_t *out);

/**
 * Closed-form Chernoff exponent.
 */
enum ts_status ts_chernoff_analytic(uint32_t scenario_code, double k, double q, double *out);

/**
 * Parity-sorting protocol error after `m` detections (equal priors and
 * brightness).
 */
enum ts_status ts_protocol(uint32_t scenario_code, double k, uint32_t m, struct ts_protocol_t *out);

/**
 * Smallest `m <= m_cap` that beats guessing; `-1` if there is none.
 */
enum ts_status ts_minimal_m(uint32_t scenario_code,
                            double k,
                            double q,
                            double p1,
                            uint32_t m_cap,
                            int64_t *out);

/**
 * Monte Carlo run of the protocol; deterministic for a given `seed`.
 */
enum ts_status ts_simulate(uint32_t scenario_code,
                           double k,
                           uint32_t m,
                           uint64_t trials,
                           uint64_t seed,
                           struct ts_simulation_t *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ts_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWOSOURCE_H */
