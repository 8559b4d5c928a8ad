#ifndef CIRCULANT_CLT_H
#define CIRCULANT_CLT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum CcltStatus {
  CCLT_STATUS_OK = 0,
  CCLT_STATUS_NULL_POINTER = 1,
  CCLT_STATUS_INVALID_ARGUMENT = 2,
  CCLT_STATUS_BUDGET_EXCEEDED = 3,
  CCLT_STATUS_NOT_SMOOTH = 4,
  CCLT_STATUS_NOT_SYMMETRIC = 5,
  CCLT_STATUS_NUMERICAL = 6,
  CCLT_STATUS_CONFIG = 7,
  CCLT_STATUS_IO = 8,
  CCLT_STATUS_PANIC = 9,
} CcltStatus;

/**
 * Input ensembles.
 */
typedef enum CcltFamily {
  CCLT_FAMILY_GAUSSIAN = 0,
  CCLT_FAMILY_RADEMACHER = 1,
  CCLT_FAMILY_UNIFORM_SYMMETRIC = 2,
  CCLT_FAMILY_CUSTOM_SMOOTH = 3,
} CcltFamily;

/**
 * Opaque polynomial `Σ_{k>=2} a_k x^k`.
 */
typedef struct CcltPolynomial CcltPolynomial;

/**
 * Opaque circulant sample.
 */
typedef struct CcltSample CcltSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library from the same thread.
 */
const char *cclt_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cclt_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cclt_string_free(char *s);

/**
 * `f_p(s)` as a double.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CcltStatus cclt_f_density(uint32_t p, uint32_t s, double *out);

/**
 * Exact `|A_{p,s}|` at box size `n`, as a decimal string.
 *
 * # Safety
 * `out` must be valid for writes; free the result with `cclt_string_free`.
 */
enum CcltStatus cclt_slice_count(uint32_t p, uint32_t s, uint64_t n, char **out);

/**
 * Creates a polynomial from dense coefficients `a_0, a_1, …, a_d`;
 * `a_0` and `a_1` must be zero.
 *
 * # Safety
 * `coeffs` must point to `len` doubles; `out` must be valid for writes.
 */
enum CcltStatus cclt_polynomial_new(const double *coeffs, size_t len, struct CcltPolynomial **out);

/**
 * # Safety
 * `poly` must come from `cclt_polynomial_new` and not have been freed.
 */
void cclt_polynomial_free(struct CcltPolynomial *poly);

/**
 * Limiting variance `Σ a_ℓ² ℓ! Σ_s f_ℓ(s)`.
 *
 * # Safety
 * `poly` must be a live handle; `out` must be valid for writes.
 */
enum CcltStatus cclt_limiting_variance(const struct CcltPolynomial *poly, double *out);

/**
 * Draws an `n × n` circulant sample. `blend` is read only for
 * `CCLT_FAMILY_CUSTOM_SMOOTH`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CcltStatus cclt_sample_new(enum CcltFamily family,
                                double blend,
                                size_t n,
                                uint64_t master_seed,
                                uint64_t replica_index,
                                struct CcltSample **out);

/**
 * Wraps raw inputs `X_0, …, X_{n-1}`; the first row is `X / √n`.
 *
 * # Safety
 * `raw` must point to `n` doubles; `out` must be valid for writes.
 */
enum CcltStatus cclt_sample_from_raw(const double *raw, size_t n, struct CcltSample **out);

/**
 * # Safety
 * `sample` must come from this library and not have been freed.
 */
void cclt_sample_free(struct CcltSample *sample);

/**
 * Matrix dimension, or 0 for NULL.
 *
 * # Safety
 * `sample` must be NULL or a live handle.
 */
size_t cclt_sample_dim(const struct CcltSample *sample);

/**
 * Copies the raw inputs into `buf`, which must hold `dim` doubles.
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum CcltStatus cclt_sample_raw_inputs(const struct CcltSample *sample, double *buf, size_t len);

/**
 * `Tr C^p` through the spectrum.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be valid for writes.
 */
enum CcltStatus cclt_sample_trace_power(const struct CcltSample *sample, uint32_t p, double *out);

/**
 * `Tr C^p` by direct index enumeration, refused above `budget` tuples.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be valid for writes.
 */
enum CcltStatus cclt_sample_trace_power_direct(const struct CcltSample *sample,
                                               uint32_t p,
                                               uint64_t budget,
                                               double *out);

/**
 * `Tr P(C)`.
 *
 * # Safety
 * Handles must be live; `out` must be valid for writes.
 */
enum CcltStatus cclt_sample_trace_polynomial(const struct CcltSample *sample,
                                             const struct CcltPolynomial *poly,
                                             double *out);

/**
 * Spectral norm `max_t |λ_t|`.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be valid for writes.
 */
enum CcltStatus cclt_sample_spectral_norm(const struct CcltSample *sample, double *out);

/**
 * Gradient of `X ↦ Tr P(C)` with respect to the raw inputs, written to `buf`
 * (`len` must equal the dimension).
 *
 * # Safety
 * Handles must be live; `buf` must be valid for `len` writes.
 */
enum CcltStatus cclt_sample_gradient(const struct CcltSample *sample,
                                     const struct CcltPolynomial *poly,
                                     double *buf,
                                     size_t len);

/**
 * Runs a Monte Carlo experiment described by a TOML config and returns the
 * JSON summary.
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string; `out_json` must be valid
 * for writes. Free the result with `cclt_string_free`.
 */
enum CcltStatus cclt_run_experiment(const char *config_toml, char **out_json);

/**
 * Total-variation bound estimate for a TOML config, as JSON.
 *
 * # Safety
 * As for `cclt_run_experiment`.
 */
enum CcltStatus cclt_tv_bound(const char *config_toml, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCULANT_CLT_H */
