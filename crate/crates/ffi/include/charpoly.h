#ifndef CHARPOLY_H
#define CHARPOLY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpDualMethod {
  CP_DUAL_METHOD_MONOMIAL = 0,
  CP_DUAL_METHOD_QUADRATURE = 1,
} CpDualMethod;

typedef enum CpEnsembleKind {
  CP_ENSEMBLE_KIND_GOE = 0,
  CP_ENSEMBLE_KIND_GUE = 1,
} CpEnsembleKind;

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_INVALID_ARGUMENT = 1,
  CP_STATUS_DIMENSION_MISMATCH = 2,
  CP_STATUS_DEGENERATE = 3,
  CP_STATUS_BUDGET = 4,
  CP_STATUS_NUMERICAL = 5,
  CP_STATUS_NULL_POINTER = 6,
  CP_STATUS_PANIC = 7,
} CpStatus;

/**
 * Opaque ensemble handle.
 */
typedef struct CpEnsemble CpEnsemble;

typedef struct CpComplex {
  double re;
  double im;
} CpComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *cp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cp_version(void);

/**
 * Creates an ensemble of dimension `dim`; `kind` is a `CpEnsembleKind` value. `source` is null or points to `dim` values.
 *
 * # Safety
 * `source` must be null or valid for `dim` reads; `out` must be writable.
 */
enum CpStatus cp_ensemble_new(uint32_t kind,
                              uintptr_t dim,
                              const double *source,
                              struct CpEnsemble **out);

/**
 * Releases a handle from [`cp_ensemble_new`]. Null is ignored.
 *
 * # Safety
 * `h` must come from `cp_ensemble_new` and not be used afterwards.
 */
void cp_ensemble_free(struct CpEnsemble *h);

/**
 * Monte Carlo estimate of `E[∏ det(λ_i − X)]`.
 *
 * # Safety
 * `lambdas` valid for `k` reads; outputs writable (`out_stderr` may be null).
 */
enum CpStatus cp_mc_correlator(const struct CpEnsemble *h,
                               const double *lambdas,
                               uintptr_t k,
                               uint64_t samples,
                               uint64_t seed,
                               struct CpComplex *out,
                               double *out_stderr);

/**
 * Exact small-N expectation (N ≤ 3, k ≤ 4).
 *
 * # Safety
 * `lambdas` valid for `k` reads; `out` writable.
 */
enum CpStatus cp_wick_oracle(const struct CpEnsemble *h,
                             const double *lambdas,
                             uintptr_t k,
                             struct CpComplex *out);

/**
 * Exact dual-integral evaluation; `method` is a `CpDualMethod` value.
 *
 * # Safety
 * `lambdas` valid for `k` reads; `out` writable.
 */
enum CpStatus cp_dual_correlator(const struct CpEnsemble *h,
                                 const double *lambdas,
                                 uintptr_t k,
                                 uint32_t method,
                                 struct CpComplex *out);

/**
 * Pfaffian of an antisymmetric `dim × dim` matrix given row-major.
 *
 * # Safety
 * `entries` valid for `dim²` reads; `out` writable.
 */
enum CpStatus cp_pfaffian(const struct CpComplex *entries, uintptr_t dim, struct CpComplex *out);

/**
 * γ_k rounded to double; `kind` is a `CpEnsembleKind` value.
 *
 * # Safety
 * `out` writable.
 */
enum CpStatus cp_gamma_k(uint32_t kind, uintptr_t k, double *out);

/**
 * `cos x/x² − sin x/x³`.
 */
double cp_kernel_goe(double x);

/**
 * `sin x / x`.
 */
double cp_kernel_sine(double x);

/**
 * χ_k at the `k(k−1)/2` values τ_12, τ_13, …, τ_{k−1,k}.
 *
 * # Safety
 * `tau` valid for `k(k−1)/2` reads; `out` writable.
 */
enum CpStatus cp_chi_eval(uintptr_t k, const struct CpComplex *tau, struct CpComplex *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CHARPOLY_H */
