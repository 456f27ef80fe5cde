#ifndef CSTRAIN_H
#define CSTRAIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function. `CSTRAIN_STATUS_OK` is zero.
 */
typedef enum CstrainStatus {
  CSTRAIN_STATUS_OK = 0,
  CSTRAIN_STATUS_NULL_POINTER = 1,
  CSTRAIN_STATUS_INVALID_ARGUMENT = 2,
  CSTRAIN_STATUS_ZERO_COLUMN = 3,
  CSTRAIN_STATUS_ZERO_MATRIX = 4,
  CSTRAIN_STATUS_SHAPE_MISMATCH = 5,
  CSTRAIN_STATUS_NON_FINITE = 6,
  CSTRAIN_STATUS_TOO_MANY_SUPPORTS = 7,
  CSTRAIN_STATUS_INVALID_SPEC = 8,
  CSTRAIN_STATUS_BAD_SPARSITY = 9,
  CSTRAIN_STATUS_BAD_SHAPE = 10,
  CSTRAIN_STATUS_INFEASIBLE = 11,
  CSTRAIN_STATUS_MAX_ITERS = 12,
  CSTRAIN_STATUS_DEGENERATE_CONSTRAINT = 13,
  CSTRAIN_STATUS_TOO_LARGE = 14,
  CSTRAIN_STATUS_ALL_DEGENERATE = 15,
  CSTRAIN_STATUS_NO_CANDIDATES = 16,
  CSTRAIN_STATUS_FACTORIZATION_FAILED = 17,
  CSTRAIN_STATUS_NOT_ENOUGH_EASY = 18,
  CSTRAIN_STATUS_ALL_FAILED = 19,
  CSTRAIN_STATUS_INFEASIBLE_KNOBS = 20,
  CSTRAIN_STATUS_PARSE = 21,
  CSTRAIN_STATUS_IO = 22,
  CSTRAIN_STATUS_JSON = 23,
  CSTRAIN_STATUS_CSV = 24,
  CSTRAIN_STATUS_BUFFER_TOO_SMALL = 25,
  CSTRAIN_STATUS_PANIC = 99,
} CstrainStatus;

/**
 * Opaque dense matrix handle.
 */
typedef struct CstrainMatrix CstrainMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or null if the
 * last call succeeded. Valid until the next call on the same thread.
 */
const char *cstrain_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cstrain_version(void);

/**
 * Builds a `rows x cols` matrix from `rows * cols` row-major entries.
 *
 * # Safety
 * `data` must point to `rows * cols` readable doubles; `out` must be writable.
 */
enum CstrainStatus cstrain_matrix_new(size_t rows,
                                      size_t cols,
                                      const double *data,
                                      struct CstrainMatrix **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `m` must be null or a handle returned by this library that was not yet freed.
 */
void cstrain_matrix_free(struct CstrainMatrix *m);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t cstrain_matrix_rows(const struct CstrainMatrix *m);

/**
 * Number of columns, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t cstrain_matrix_cols(const struct CstrainMatrix *m);

/**
 * Copies the entries in row-major order into `buf`, which holds `len` doubles.
 *
 * # Safety
 * `m` must be a live handle and `buf` must point to `len` writable doubles.
 */
enum CstrainStatus cstrain_matrix_copy_row_major(const struct CstrainMatrix *m,
                                                 double *buf,
                                                 size_t len);

/**
 * Reads a whitespace-separated text matrix.
 *
 * # Safety
 * `file` must be a NUL-terminated string; `out` must be writable.
 */
enum CstrainStatus cstrain_matrix_read(const char *file, struct CstrainMatrix **out);

/**
 * Writes a matrix in the text format read by [`cstrain_matrix_read`].
 *
 * # Safety
 * `m` must be a live handle and `file` a NUL-terminated string.
 */
enum CstrainStatus cstrain_matrix_write(const struct CstrainMatrix *m, const char *file);

/**
 * Minimum ℓ1-norm solution of `M x = b` with default solver options.
 *
 * `x_out` receives `cols(M)` entries. When the solver stops at its iteration
 * limit the best iterate is still written and `CSTRAIN_STATUS_MAX_ITERS` is
 * returned. `objective` may be null.
 *
 * # Safety
 * `b` must hold `b_len` doubles and `x_out` must hold `x_len` writable doubles.
 */
enum CstrainStatus cstrain_basis_pursuit(const struct CstrainMatrix *m,
                                         const double *b,
                                         size_t b_len,
                                         double *x_out,
                                         size_t x_len,
                                         double *objective);

/**
 * Exhaustive restricted isometry constant of `M` at
 * sparsity `t`, enumerating at most `max_supports` supports.
 *
 * # Safety
 * `m` must be a live handle and `epsilon` writable.
 */
enum CstrainStatus cstrain_rip_constant(const struct CstrainMatrix *m,
                                        size_t t,
                                        uint64_t max_supports,
                                        double *epsilon);

/**
 * `‖M‖_F² / ‖M‖₂²`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum CstrainStatus cstrain_stable_rank(const struct CstrainMatrix *m, double *out);

/**
 * Factors `Y ≈ X̄ Z̄` with sparse `X̄`, using the random stream
 * `(seed, stream)` for row pairings. Both outputs are new handles.
 *
 * # Safety
 * `y` must be a live handle; `x_bar` and `z_bar` must be writable.
 */
enum CstrainStatus cstrain_sparse_factorization(const struct CstrainMatrix *y,
                                                uint64_t seed,
                                                uint64_t stream,
                                                struct CstrainMatrix **x_bar,
                                                struct CstrainMatrix **z_bar);

/**
 * Recovers `x = X̄ S z` from `b = A x` given learned components `X̄`.
 *
 * # Safety
 * `b` must hold `b_len` doubles and `x_out` must hold `x_len` writable doubles.
 */
enum CstrainStatus cstrain_sparse_recovery(const struct CstrainMatrix *a,
                                           const double *b,
                                           size_t b_len,
                                           const struct CstrainMatrix *x_bar,
                                           double *x_out,
                                           size_t x_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSTRAIN_H */
