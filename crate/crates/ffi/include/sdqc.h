#ifndef SDQC_H
#define SDQC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SdqcStatus {
  SDQC_STATUS_OK = 0,
  SDQC_STATUS_NULL_POINTER = 1,
  SDQC_STATUS_INVALID_ARGUMENT = 2,
  SDQC_STATUS_PARSE = 3,
  SDQC_STATUS_EMPTY_SET = 4,
  SDQC_STATUS_DEGENERATE = 5,
  SDQC_STATUS_NOT_CONVERGED = 6,
  SDQC_STATUS_OUT_OF_RANGE = 7,
  SDQC_STATUS_PANIC = 8,
} SdqcStatus;

typedef enum SdqcVerdict {
  SDQC_VERDICT_MEMBER = 0,
  SDQC_VERDICT_PHI_MEMBER_ONLY = 1,
  SDQC_VERDICT_NOT_MEMBER = 2,
} SdqcVerdict;

/**
 * Opaque hull computed from a planar set.
 */
typedef struct SdqcHull SdqcHull;

/**
 * Opaque planar set.
 */
typedef struct SdqcPlanarSet SdqcPlanarSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Pressure and shear invariants of a symmetric `n×n` matrix (`n` = 2 or 3),
 * given row-major.
 *
 * # Safety
 * `rows` must point to `n * n` doubles; `p_out` and `q_out` must be writable.
 */
enum SdqcStatus sdqc_phi(const double *rows, size_t n, double *p_out, double *q_out);

/**
 * `(n-1)|F|² - (Tr F)²` for a row-major `n×n` matrix.
 *
 * # Safety
 * `rows` must point to `n * n` doubles; `out` must be writable.
 */
enum SdqcStatus sdqc_tartar(const double *rows, size_t n, double *out);

/**
 * Parses a planar set from its JSON description.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum SdqcStatus sdqc_planar_set_from_json(const char *json, struct SdqcPlanarSet **out);

/**
 * # Safety
 * `set` must come from [`sdqc_planar_set_from_json`] and not be freed twice.
 */
void sdqc_planar_set_free(struct SdqcPlanarSet *set);

/**
 * Hull of `set` on `resolution` grid nodes; `rel_tol <= 0` selects the default.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum SdqcStatus sdqc_hull_new(const struct SdqcPlanarSet *set,
                              size_t resolution,
                              double rel_tol,
                              struct SdqcHull **out);

/**
 * # Safety
 * `hull` must come from [`sdqc_hull_new`] and not be freed twice.
 */
void sdqc_hull_free(struct SdqcHull *hull);

/**
 * Number of grid nodes.
 *
 * # Safety
 * `hull` must be a live handle; `out` must be writable.
 */
enum SdqcStatus sdqc_hull_len(const struct SdqcHull *hull, size_t *out);

/**
 * Node `i`: its abscissa, the envelope value and whether it is defined.
 *
 * # Safety
 * `hull` must be a live handle; the outputs must be writable.
 */
enum SdqcStatus sdqc_hull_node(const struct SdqcHull *hull,
                               size_t i,
                               double *p,
                               double *psi,
                               bool *defined);

/**
 * # Safety
 * `hull` must be a live handle; `out` must be writable.
 */
enum SdqcStatus sdqc_hull_connected(const struct SdqcHull *hull, bool *out);

/**
 * # Safety
 * `hull` must be a live handle; `out` must be writable.
 */
enum SdqcStatus sdqc_hull_slope_condition(const struct SdqcHull *hull, bool *out);

/**
 * Classifies a row-major symmetric `n×n` matrix against the hull.
 *
 * # Safety
 * `hull` must be a live handle; `rows` must point to `n * n` doubles; `out`
 * must be writable.
 */
enum SdqcStatus sdqc_hull_membership(const struct SdqcHull *hull,
                                     const double *rows,
                                     size_t n,
                                     enum SdqcVerdict *out);

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sdqc_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *sdqc_status_message(enum SdqcStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDQC_H */
