#ifndef QVERIFY_FFI_H
#define QVERIFY_FFI_H

/* This file is generated by cbindgen from the qverify-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Complementarity characterization selector.
 */
typedef enum {
  QV_METHOD_DIRECT = 0,
  QV_METHOD_DOUBLED = 1,
  QV_METHOD_ALPHA = 2,
  QV_METHOD_REFLECTED = 3,
  QV_METHOD_CONTROLLED4 = 4,
} QvMethod;

/**
 * Key-distribution protocol selector.
 */
typedef enum {
  QV_PROTOCOL_BB84 = 0,
  QV_PROTOCOL_E91 = 1,
} QvProtocol;

/**
 * Status code returned by every FFI call.
 */
typedef enum {
  /**
   * Success; out-parameters are valid.
   */
  QV_OK = 0,
  /**
   * A pointer argument was null.
   */
  QV_NULL_POINTER = 1,
  /**
   * An argument was out of range or otherwise invalid.
   */
  QV_INVALID_ARGUMENT = 2,
  /**
   * The requested dimension is not shipped.
   */
  QV_UNSUPPORTED_DIMENSION = 3,
  /**
   * Input data could not be parsed or validated as a family.
   */
  QV_INVALID_FAMILY = 4,
  /**
   * Internal failure (a panic was caught at the boundary).
   */
  QV_INTERNAL = 5,
} QvStatus;

/**
 * Opaque handle to a validated controlled family.
 */
typedef struct QvFamily QvFamily;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the most recent error on this thread. The pointer stays
 * valid until the next failing call from the same thread.
 */
const char *qv_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *qv_version(void);

/**
 * Build the shipped unbiased basis family for a dimension. On success the
 * new handle is written to `out` and must be released with
 * `qv_family_free`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
QvStatus qv_family_mub(uintptr_t dim, QvFamily **out);

/**
 * Build a family from interleaved complex entries. `entries` holds
 * `count * dim * dim * 2` doubles: for basis `a` and vector `i`, component
 * `r` lives at `(((a * dim) + i) * dim + r) * 2` (real part first).
 * Every basis must be unitary.
 *
 * # Safety
 * `entries` must point to `count * dim * dim * 2` readable doubles and
 * `out` must be a valid pointer.
 */
QvStatus qv_family_new(uintptr_t dim, uintptr_t count, const double *entries, QvFamily **out);

/**
 * Release a family handle. Null is accepted and ignored.
 *
 * # Safety
 * `family` must be null or a pointer from `qv_family_mub`/`qv_family_new`
 * that has not been freed.
 */
void qv_family_free(QvFamily *family);

/**
 * Hilbert-space dimension of a family.
 *
 * # Safety
 * `family` must be a live handle.
 */
uintptr_t qv_family_dim(const QvFamily *family);

/**
 * Number of bases in a family.
 *
 * # Safety
 * `family` must be a live handle.
 */
uintptr_t qv_family_count(const QvFamily *family);

/**
 * Run one complementarity characterization. Writes the verdict and the
 * worst violation.
 *
 * # Safety
 * `family`, `out_passed` and `out_violation` must be valid pointers.
 */
QvStatus qv_check_complementary(const QvFamily *family,
                                QvMethod method,
                                double tol,
                                bool *out_passed,
                                double *out_violation);

/**
 * Run a key-distribution check. Writes the verdict and the worst
 * violation.
 *
 * # Safety
 * `family`, `out_passed` and `out_violation` must be valid pointers.
 */
QvStatus qv_check_qkd(const QvFamily *family,
                      QvProtocol protocol,
                      double tol,
                      bool *out_passed,
                      double *out_violation);

/**
 * Build and verify the standard Mean King scheme for a dimension. Writes
 * the verdict and the exact success probability.
 *
 * # Safety
 * `out_passed` and `out_success` must be valid pointers.
 */
QvStatus qv_mean_king_verify(uintptr_t dim, double tol, bool *out_passed, double *out_success);

/**
 * Exact conditional distribution of the standard scheme given the King's
 * basis and outcome. Fills `dim * dim` probabilities and guesses, indexed
 * by Alice's outcome.
 *
 * # Safety
 * `probabilities` and `guesses` must point to `dim * dim` writable slots.
 */
QvStatus qv_mean_king_simulate(uintptr_t dim,
                               uintptr_t king_basis,
                               uintptr_t king_outcome,
                               double *probabilities,
                               uintptr_t *guesses);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QVERIFY_FFI_H */
