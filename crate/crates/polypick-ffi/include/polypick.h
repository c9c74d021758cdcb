#ifndef POLYPICK_H
#define POLYPICK_H

/* Generated by cbindgen from polypick-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of fallible calls.
 */
typedef enum PpkStatus {
  PPK_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PPK_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PPK_STATUS_INVALID_UTF8 = 2,
  /**
   * Input failed validation (schema, tolerance, domain).
   */
  PPK_STATUS_INVALID_INPUT = 3,
  /**
   * A numerical step failed (pole, eigensolver, ill-posed extension).
   */
  PPK_STATUS_NUMERIC = 4,
  /**
   * The operation does not apply to this handle (e.g. ambient kernel).
   */
  PPK_STATUS_UNSUPPORTED = 5,
  /**
   * An internal panic was caught; state may be inconsistent.
   */
  PPK_STATUS_PANIC = 6,
} PpkStatus;

/**
 * Uniqueness certificate (opaque).
 */
typedef struct PpkCertificate PpkCertificate;

/**
 * Rationally parameterized inner curve (opaque).
 */
typedef struct PpkCurve PpkCurve;

/**
 * Rational inner function in Rudin form (opaque).
 */
typedef struct PpkFunction PpkFunction;

/**
 * Pick problem with its kernel source (opaque).
 */
typedef struct PpkProblem PpkProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread; do not free it.
 */
const char *ppk_last_error(void);

/**
 * Release a string returned by a `*_to_json` function.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void ppk_string_free(char *s);

/**
 * Parse a curve from its JSON encoding; null on error.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string.
 */
struct PpkCurve *ppk_curve_from_json(const char *json);

/**
 * # Safety
 * `curve` must come from [`ppk_curve_from_json`] and not be freed twice.
 */
void ppk_curve_free(struct PpkCurve *curve);

/**
 * Parse a rational inner function from its JSON encoding; null on error.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string.
 */
struct PpkFunction *ppk_function_from_json(const char *json);

/**
 * # Safety
 * `function` must come from [`ppk_function_from_json`] and not be freed twice.
 */
void ppk_function_free(struct PpkFunction *function);

/**
 * Degree of the function on the curve (rank/degree formula, cross-checked
 * against the winding oracle).
 *
 * # Safety
 * All handles must be valid; `out_degree` must point to writable memory.
 */
enum PpkStatus ppk_degree_on_curve(const struct PpkCurve *curve,
                                   const struct PpkFunction *function,
                                   uint64_t *out_degree);

/**
 * Sample `n_nodes` curve points on the circle `|t| = radius`, target them
 * with the function, and pose the problem against the curve kernel of the
 * given truncation degree and quadrature size. Null on error.
 *
 * # Safety
 * All handles must be valid.
 */
struct PpkProblem *ppk_construct_problem(const struct PpkCurve *curve,
                                         const struct PpkFunction *function,
                                         uint64_t n_nodes,
                                         double radius,
                                         uint64_t degree,
                                         uint64_t quad);

/**
 * Parse a problem file; rebuilds the kernel space, so this requadratures.
 * Null on error.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string.
 */
struct PpkProblem *ppk_problem_from_json(const char *json);

/**
 * Serialize the problem; release with [`ppk_string_free`]. Null on error.
 *
 * # Safety
 * `problem` must be a valid handle.
 */
char *ppk_problem_to_json(const struct PpkProblem *problem);

/**
 * # Safety
 * `problem` must come from this library and not be freed twice.
 */
void ppk_problem_free(struct PpkProblem *problem);

/**
 * Run all uniqueness checks. `epsilon > 0` fixes the perturbation size,
 * any other value searches the decreasing sequence. Null on error; a
 * certificate with failing clauses is still returned (inspect
 * [`ppk_certificate_all_pass`]).
 *
 * # Safety
 * All handles must be valid.
 */
struct PpkCertificate *ppk_certify(const struct PpkProblem *problem,
                                   const struct PpkFunction *function,
                                   uint64_t seed,
                                   double epsilon);

/**
 * 1 if every clause passed, 0 if some clause failed, -1 on null input.
 *
 * # Safety
 * `cert` must be a valid handle or null.
 */
int32_t ppk_certificate_all_pass(const struct PpkCertificate *cert);

/**
 * Serialize the certificate; release with [`ppk_string_free`]. Null on error.
 *
 * # Safety
 * `cert` must be a valid handle.
 */
char *ppk_certificate_to_json(const struct PpkCertificate *cert);

/**
 * # Safety
 * `cert` must come from [`ppk_certify`] and not be freed twice.
 */
void ppk_certificate_free(struct PpkCertificate *cert);

/**
 * Forced value of every solution at a curve parameter `t_re + i t_im`
 * (curve-kernel problems only).
 *
 * # Safety
 * `problem` must be valid; out-pointers must be writable.
 */
enum PpkStatus ppk_extend_at_parameter(const struct PpkProblem *problem,
                                       double t_re,
                                       double t_im,
                                       double *out_re,
                                       double *out_im);

/**
 * Forced value of every solution at an ambient point (Szegő-kernel
 * problems). `point` holds `2 * dim` doubles, interleaved re, im.
 *
 * # Safety
 * `problem` must be valid; `point` must hold `2 * dim` doubles; out-pointers
 * must be writable.
 */
enum PpkStatus ppk_extend_at_point(const struct PpkProblem *problem,
                                   const double *point,
                                   uint64_t dim,
                                   double *out_re,
                                   double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYPICK_H */
