#ifndef SEPSCAN_H
#define SEPSCAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Default absolute tolerance for separability decisions.
 */
#define SEPSCAN_DEFAULT_TOLERANCE 1e-9

typedef enum SepscanStatus {
  SEPSCAN_STATUS_OK = 0,
  SEPSCAN_STATUS_NULL_POINTER = 1,
  SEPSCAN_STATUS_INVALID_INPUT = 2,
  SEPSCAN_STATUS_TOO_LARGE = 3,
  SEPSCAN_STATUS_DISAGREEMENT = 4,
  SEPSCAN_STATUS_NUMERICAL = 5,
  SEPSCAN_STATUS_BUFFER_TOO_SMALL = 6,
  SEPSCAN_STATUS_PANIC = 7,
} SepscanStatus;

/**
 * Opaque finest factorization.
 */
typedef struct SepscanFactorization SepscanFactorization;

/**
 * Opaque pure state.
 */
typedef struct SepscanState SepscanState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a state from `len` amplitudes given as `2 * len` interleaved
 * doubles. The vector must have unit norm within 1e-6.
 *
 * # Safety
 * `re_im` must point to `2 * len` readable doubles and `out` must be a
 * valid pointer.
 */
enum SepscanStatus sepscan_state_new(const double *re_im, size_t len, struct SepscanState **out);

/**
 * # Safety
 * `state` must come from [`sepscan_state_new`] and not be used afterwards.
 */
void sepscan_state_free(struct SepscanState *state);

/**
 * # Safety
 * Pointers must be valid.
 */
enum SepscanStatus sepscan_state_qubits(const struct SepscanState *state, size_t *out);

/**
 * Tests whether qubit `label` (1-based) factors out. Writes the verdict
 * and the squared Bloch-vector norm.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SepscanStatus sepscan_one_part_separable(const struct SepscanState *state,
                                              size_t label,
                                              double tol,
                                              bool *separable,
                                              double *xi_sq);

/**
 * Tests whether the block of `count` labels factors out. Writes the
 * verdict and the residual `max_norm_sq - norm_sq`.
 *
 * # Safety
 * `labels` must point to `count` readable values; other pointers valid.
 */
enum SepscanStatus sepscan_block_separable(const struct SepscanState *state,
                                           const size_t *labels,
                                           size_t count,
                                           double tol,
                                           bool *separable,
                                           double *residual);

/**
 * # Safety
 * Pointers must be valid.
 */
enum SepscanStatus sepscan_fully_separable(const struct SepscanState *state,
                                           double tol,
                                           bool *separable);

/**
 * Schmidt coefficients across `block | complement`, descending. `len`
 * receives the count; if `cap` is smaller, nothing is copied and
 * `BufferTooSmall` is returned.
 *
 * # Safety
 * `out` must have room for `cap` doubles; other pointers valid.
 */
enum SepscanStatus sepscan_schmidt_coefficients(const struct SepscanState *state,
                                                const size_t *labels,
                                                size_t count,
                                                double *out,
                                                size_t cap,
                                                size_t *len);

/**
 * Finest tensor factorization of the state.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SepscanStatus sepscan_factorize(const struct SepscanState *state,
                                     double tol,
                                     struct SepscanFactorization **out);

/**
 * # Safety
 * `f` must come from [`sepscan_factorize`] and not be used afterwards.
 */
void sepscan_factorization_free(struct SepscanFactorization *f);

/**
 * # Safety
 * Pointers must be valid.
 */
enum SepscanStatus sepscan_factorization_block_count(const struct SepscanFactorization *f,
                                                     size_t *out);

/**
 * Labels of block `index`, ascending. Same buffer protocol as
 * [`sepscan_schmidt_coefficients`].
 *
 * # Safety
 * `out` must have room for `cap` values; other pointers valid.
 */
enum SepscanStatus sepscan_factorization_block_labels(const struct SepscanFactorization *f,
                                                      size_t index,
                                                      size_t *out,
                                                      size_t cap,
                                                      size_t *len);

/**
 * Whether block `index` has two or more qubits with no separable part.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SepscanStatus sepscan_factorization_block_entangled(const struct SepscanFactorization *f,
                                                         size_t index,
                                                         bool *out);

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `cap`). Returns the full message length
 * including the terminator; 0 means no error was recorded.
 *
 * # Safety
 * `buf` must have room for `cap` bytes, or be null with `cap == 0`.
 */
size_t sepscan_last_error_message(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sepscan_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEPSCAN_H */
