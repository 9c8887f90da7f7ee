/* C interface to the qubosmith QUBO solver library. */

#ifndef QUBOSMITH_H
#define QUBOSMITH_H

/* Generated by cbindgen from qubosmith-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible calls.
 */
typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_ARGUMENT = 1,
  QS_STATUS_INVALID_UTF8 = 2,
  QS_STATUS_PARSE_ERROR = 3,
  QS_STATUS_IO_ERROR = 4,
  QS_STATUS_CAPACITY_ERROR = 5,
  QS_STATUS_CONFIG_ERROR = 6,
  QS_STATUS_UNKNOWN_SOLVER = 7,
  QS_STATUS_DIMENSION_MISMATCH = 8,
  QS_STATUS_DOMAIN_ERROR = 9,
  QS_STATUS_SOLVE_FAILED = 10,
  QS_STATUS_BUFFER_TOO_SMALL = 11,
} QsStatus;

/**
 * Opaque QUBO coefficient matrix handle.
 */
typedef struct QsMatrix QsMatrix;

/**
 * Opaque solve-result handle.
 */
typedef struct QsResult QsResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Reads a native-format instance file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string, `out` a valid pointer.
 */
enum QsStatus qs_matrix_from_file(const char *path, struct QsMatrix **out);

/**
 * Generates a fully dense Gaussian random instance (mean 0, given sigma);
 * identical `(n, sigma, seed)` always produce the same matrix.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QsStatus qs_matrix_random(uint64_t n, double sigma, uint64_t seed, struct QsMatrix **out);

/**
 * Parses a G-set Max-Cut graph file and reduces it to a minimization QUBO
 * whose energies are negated cut values.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string, `out` a valid pointer.
 */
enum QsStatus qs_matrix_from_gset_file(const char *path, struct QsMatrix **out);

/**
 * Writes the matrix in the native instance format.
 *
 * # Safety
 * `matrix` must be a live handle; `path` a valid NUL-terminated string.
 */
enum QsStatus qs_matrix_write_file(const struct QsMatrix *matrix, const char *path);

/**
 * Number of binary variables; 0 for a null handle.
 *
 * # Safety
 * `matrix` must be a live handle or null.
 */
size_t qs_matrix_num_vars(const struct QsMatrix *matrix);

/**
 * Interaction density (stored off-diagonal couplers over n-choose-2).
 *
 * # Safety
 * `matrix` must be a live handle; `out` a valid pointer.
 */
enum QsStatus qs_matrix_density(const struct QsMatrix *matrix, double *out);

/**
 * Evaluates the energy of an assignment (`len` bytes, each 0 or 1).
 *
 * # Safety
 * `bits` must point at `len` readable bytes; other pointers as above.
 */
enum QsStatus qs_matrix_energy(const struct QsMatrix *matrix,
                               const uint8_t *bits,
                               size_t len,
                               double *out);

/**
 * Releases a matrix handle; null is a no-op.
 *
 * # Safety
 * `matrix` must have come from this library and not be freed twice.
 */
void qs_matrix_free(struct QsMatrix *matrix);

/**
 * Runs a solver against a matrix. `solver_id` is one of `bf`, `sa`, `sd`,
 * `ts`, `pticm` or `qbsolv-like:<inner>`; `config_json` may be NULL for
 * defaults.
 *
 * # Safety
 * Pointer arguments as documented in the module header.
 */
enum QsStatus qs_solve(const struct QsMatrix *matrix,
                       const char *solver_id,
                       const char *config_json,
                       struct QsResult **out);

/**
 * Best energy found; NaN for a null handle.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
double qs_result_energy(const struct QsResult *result);

/**
 * Solve-only wall time in seconds; NaN for a null handle.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
double qs_result_solve_time_seconds(const struct QsResult *result);

/**
 * Variable count of the solved instance.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
size_t qs_result_num_vars(const struct QsResult *result);

/**
 * Copies the best assignment into `buf` (one byte per variable).
 *
 * # Safety
 * `buf` must point at `len` writable bytes.
 */
enum QsStatus qs_result_bits(const struct QsResult *result, uint8_t *buf, size_t len);

/**
 * Number of per-read energies available.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
size_t qs_result_num_reads(const struct QsResult *result);

/**
 * Copies the per-read energies into `buf`.
 *
 * # Safety
 * `buf` must point at `len` writable doubles.
 */
enum QsStatus qs_result_read_energies(const struct QsResult *result, double *buf, size_t len);

/**
 * Solver metadata as a JSON object; free with `qs_string_free`. NULL for a
 * null handle.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
char *qs_result_metadata_json(const struct QsResult *result);

/**
 * Releases a result handle; null is a no-op.
 *
 * # Safety
 * `result` must have come from this library and not be freed twice.
 */
void qs_result_free(struct QsResult *result);

/**
 * Message of the last error on this thread, or NULL; free with
 * `qs_string_free`.
 */
char *qs_last_error_message(void);

/**
 * Frees a string returned by this library; null is a no-op.
 *
 * # Safety
 * `s` must have come from this library and not be freed twice.
 */
void qs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUBOSMITH_H */
