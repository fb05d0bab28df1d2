#ifndef SPECLIFT_H
#define SPECLIFT_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum SpecliftStatus {
  // Success; output parameters are valid.
  SpecliftStatusOk = 0,
  // A pointer argument was null.
  SpecliftStatusNullPointer = 1,
  // Malformed input (shape, schema, domain violations).
  SpecliftStatusInvalidArgument = 2,
  // A numerical routine failed (non-convergence, singularity, ambiguous
  // structure).
  SpecliftStatusNumericalFailure = 3,
} SpecliftStatus;

// Opaque handle to a dense complex matrix.
typedef struct SpecliftMatrix SpecliftMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Most recent error message on this thread; valid until the next failing
// call from the same thread. Never null.
const char *speclift_last_error_message(void);

// Library version as a static string.
const char *speclift_version(void);

// Builds an `n x n` matrix from `2 n^2` doubles: row-major entries, each as
// a (re, im) pair.
//
// # Safety
// `entries` must point to `2 n^2` readable doubles and `out` to a writable
// pointer slot.
enum SpecliftStatus speclift_matrix_new(uintptr_t n,
                                        const double *entries,
                                        struct SpecliftMatrix **out);

// Frees a matrix handle; null is ignored.
//
// # Safety
// `m` must be a pointer returned by this library and not yet freed.
void speclift_matrix_free(struct SpecliftMatrix *m);

// Writes the symmetrized-polydisc coordinates as `2n` doubles (re, im
// pairs).
//
// # Safety
// `m` must be a live handle; `out_pairs` must point to `2n` writable
// doubles.
enum SpecliftStatus speclift_project(const struct SpecliftMatrix *m, double *out_pairs);

// Spectral radius of the matrix.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum SpecliftStatus speclift_spectral_radius(const struct SpecliftMatrix *m, double *out);

// Spectral-ball membership: `out_inside` is 1 or 0, `out_margin` is
// `1 - rho`.
//
// # Safety
// `m` must be a live handle; both outputs must be writable.
enum SpecliftStatus speclift_in_spectral_ball(const struct SpecliftMatrix *m,
                                              int32_t *out_inside,
                                              double *out_margin);

// Whether the matrix is cyclic (one Jordan block per eigenvalue).
// Non-positive tolerances select the defaults.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum SpecliftStatus speclift_is_cyclic(const struct SpecliftMatrix *m,
                                       double rank_tol,
                                       double cluster_tol,
                                       int32_t *out);

// Jordan structure of the matrix as a JSON payload: clusters with
// eigenvalue, multiplicity, partition and Weyr characteristic, plus the
// minimal-generator sequence. Non-positive tolerances select the defaults.
//
// # Safety
// `m` must be a live handle; `out` receives a string freed by
// [`speclift_string_free`].
enum SpecliftStatus speclift_jordan_json(const struct SpecliftMatrix *m,
                                         double rank_tol,
                                         double cluster_tol,
                                         char **out);

// Runs the lifting criterion at every node of an instance (JSON, same
// schema as the CLI input) and returns the verdict payload as JSON.
//
// # Safety
// `instance_json` must be a NUL-terminated string; `out` receives a string
// freed by [`speclift_string_free`].
enum SpecliftStatus speclift_check_global_json(const char *instance_json, char **out);

// Constructs and verifies a lifting for an all-cyclic instance; returns
// `{"lifting": ..., "verification": ..., "warnings": ...}` as JSON.
// Verification samples the disc at `samples` quasi-uniform points.
//
// # Safety
// `instance_json` must be a NUL-terminated string; `out` receives a string
// freed by [`speclift_string_free`].
enum SpecliftStatus speclift_lift_json(const char *instance_json,
                                       uint64_t seed,
                                       uintptr_t samples,
                                       char **out);

// Frees a string returned by this library; null is ignored.
//
// # Safety
// `s` must be a pointer returned by this library and not yet freed.
void speclift_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECLIFT_H */
