/* C interface to the applab operator library. */

#ifndef APPLAB_H
#define APPLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every entry point.
 */
typedef enum ApplabStatus {
  /**
   * Success; `out` holds the result.
   */
  ApplabOk = 0,
  /**
   * A required pointer argument was null.
   */
  ApplabNullPointer = 1,
  /**
   * The coefficient lists violate the class constraints.
   */
  ApplabInvalidPair = 2,
  /**
   * A scalar argument is out of domain (n, rho, x, order, ...).
   */
  ApplabBadArgument = 3,
  /**
   * The requested moment or integral diverges at these parameters.
   */
  ApplabDivergent = 4,
  /**
   * An iterative computation failed to converge.
   */
  ApplabNoConvergence = 5,
  /**
   * Unexpected internal failure.
   */
  ApplabInternal = 6,
} ApplabStatus;

/**
 * Smoothed operator at fixed (coefficients, n, rho, c); create with
 * `applab_operator_new`, release with `applab_operator_free`.
 */
typedef struct ApplabOperator ApplabOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds an operator from coefficient lists `a[0..a_len]`, `b[0..b_len]`
 * (b may be empty), sample density `n`, smoothing exponent `rho`, and tail
 * parameter `c`. On success writes the new handle to `out`.
 *
 * # Safety
 * `a` and `b` must point to readable arrays of the stated lengths (null is
 * accepted for a zero length); `out` must be a valid pointer.
 */
enum ApplabStatus applab_operator_new(const double *a,
                                      size_t a_len,
                                      const double *b,
                                      size_t b_len,
                                      double n,
                                      double rho,
                                      unsigned int c,
                                      struct ApplabOperator **out);

/**
 * Releases a handle from `applab_operator_new`. Null is a no-op.
 *
 * # Safety
 * `op` must be null or a handle not yet freed.
 */
void applab_operator_free(struct ApplabOperator *op);

/**
 * Re-checks the class constraints and basis positivity over `xs`; writes 1
 * to `out_ok` when every check passes, 0 otherwise.
 *
 * # Safety
 * `op` must be a live handle; `xs` must hold `xs_len` readable values
 * (null accepted for zero length); `out_ok` must be a valid pointer.
 */
enum ApplabStatus applab_operator_validate(const struct ApplabOperator *op,
                                           const double *xs,
                                           size_t xs_len,
                                           size_t max_index,
                                           int32_t *out_ok);

/**
 * Raw moment S(zeta^r; x) by the closed-form route, r = 0..4.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum ApplabStatus applab_raw_moment(const struct ApplabOperator *op,
                                    double x,
                                    unsigned int r,
                                    double *out);

/**
 * Central moment S((zeta - x)^r; x), r in {1, 2, 4}.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum ApplabStatus applab_central_moment(const struct ApplabOperator *op,
                                        double x,
                                        unsigned int r,
                                        double *out);

/**
 * S(zeta^r; x) through weight summation against the closed kernel moments.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum ApplabStatus applab_apply_monomial(const struct ApplabOperator *op,
                                        unsigned int r,
                                        double x,
                                        double *out);

/**
 * S(p; x) for the polynomial p(zeta) = coeffs[0] + coeffs[1] zeta + ...,
 * integrated by kernel quadrature.
 *
 * # Safety
 * `op` must be a live handle, `coeffs` must hold `len` readable values,
 * and `out` must be a valid pointer.
 */
enum ApplabStatus applab_apply_poly(const struct ApplabOperator *op,
                                    const double *coeffs,
                                    size_t len,
                                    double x,
                                    double *out);

/**
 * Extrapolated limit of n^k times the central moment of the given order
 * (order 1 and 2 scale by n, order 4 by n^2); the limit depends on the
 * operator shape but not on its n.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum ApplabStatus applab_moment_limit(const struct ApplabOperator *op,
                                      double x,
                                      unsigned int order,
                                      double *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *applab_version(void);

/**
 * Static NUL-terminated description of a status code.
 */
const char *applab_status_message(enum ApplabStatus status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* APPLAB_H */
