#ifndef SCREENEST_H
#define SCREENEST_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScreenestStatus {
  SCREENEST_STATUS_OK = 0,
  SCREENEST_STATUS_NULL_POINTER = 1,
  SCREENEST_STATUS_INVALID_UTF8 = 2,
  SCREENEST_STATUS_CONFIG = 3,
  SCREENEST_STATUS_INVALID_MODEL = 4,
  SCREENEST_STATUS_NO_PREMIUM = 5,
  SCREENEST_STATUS_WRONG_METHOD = 6,
  SCREENEST_STATUS_SOLVE = 7,
  SCREENEST_STATUS_BUFFER_TOO_SMALL = 8,
  SCREENEST_STATUS_OUT_OF_RANGE = 9,
  SCREENEST_STATUS_PANIC = 10,
} ScreenestStatus;

typedef enum ScreenestMethod {
  SCREENEST_METHOD_AUTO = 0,
  SCREENEST_METHOD_CLOSED = 1,
  SCREENEST_METHOD_NUMERIC = 2,
} ScreenestMethod;

/**
 * Opaque problem instance.
 */
typedef struct ScreenestInstance ScreenestInstance;

/**
 * Opaque solution bundle.
 */
typedef struct ScreenestSolution ScreenestSolution;

/**
 * Hypothesis verdicts (1 = pass, 0 = fail) and the market size.
 */
typedef struct ScreenestCheckSummary {
  int32_t premium;
  int32_t h1;
  int32_t h2;
  int32_t h3;
  size_t market_size;
} ScreenestCheckSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *screenest_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *screenest_version(void);

/**
 * Builds an instance from a JSON configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScreenestStatus screenest_instance_from_json(const char *json, struct ScreenestInstance **out);

/**
 * # Safety
 * `inst` must come from [`screenest_instance_from_json`] or be null.
 */
void screenest_instance_free(struct ScreenestInstance *inst);

/**
 * # Safety
 * `inst` and `out` must be valid pointers.
 */
enum ScreenestStatus screenest_check(const struct ScreenestInstance *inst,
                                     struct ScreenestCheckSummary *out);

/**
 * Solves the instance. Non-nested candidates are returned as solutions with
 * `screenest_solution_is_nested` equal to 0.
 *
 * # Safety
 * `inst` and `out` must be valid pointers.
 */
enum ScreenestStatus screenest_solve(const struct ScreenestInstance *inst,
                                     enum ScreenestMethod method,
                                     struct ScreenestSolution **out);

/**
 * # Safety
 * `sol` must come from [`screenest_solve`] or be null.
 */
void screenest_solution_free(struct ScreenestSolution *sol);

/**
 * Market size `M`, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be a valid solution handle or null.
 */
size_t screenest_solution_market_size(const struct ScreenestSolution *sol);

/**
 * Profit, or NaN for a null handle.
 *
 * # Safety
 * `sol` must be a valid solution handle or null.
 */
double screenest_solution_profit(const struct ScreenestSolution *sol);

/**
 * 1 when the solution passed validation, 0 otherwise (or for null).
 *
 * # Safety
 * `sol` must be a valid solution handle or null.
 */
int32_t screenest_solution_is_nested(const struct ScreenestSolution *sol);

/**
 * Breakpoints `t_0..t_{M-1}`. `written` (optional) receives the required
 * length even when the buffer is too small.
 *
 * # Safety
 * `sol` must be a valid handle and `buf` must hold `len` values.
 */
enum ScreenestStatus screenest_solution_breakpoints(const struct ScreenestSolution *sol,
                                                    double *buf,
                                                    size_t len,
                                                    size_t *written);

/**
 * Prices `v_0..v_M`, same buffer protocol as the breakpoints.
 *
 * # Safety
 * `sol` must be a valid handle and `buf` must hold `len` values.
 */
enum ScreenestStatus screenest_solution_prices(const struct ScreenestSolution *sol,
                                               double *buf,
                                               size_t len,
                                               size_t *written);

/**
 * Region masses `mu(X_0)..mu(X_M)`, same buffer protocol as the breakpoints.
 *
 * # Safety
 * `sol` must be a valid handle and `buf` must hold `len` values.
 */
enum ScreenestStatus screenest_solution_masses(const struct ScreenestSolution *sol,
                                               double *buf,
                                               size_t len,
                                               size_t *written);

/**
 * Derivative of the profit in `t_i` at `t`.
 *
 * # Safety
 * `inst` and `out` must be valid pointers.
 */
enum ScreenestStatus screenest_dprofit_dti(const struct ScreenestInstance *inst,
                                           size_t i,
                                           double t,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCREENEST_H */
