#ifndef KSTAB_H
#define KSTAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes, numerically equal to the CLI exit codes where they overlap.
 */
typedef enum {
  KSTAB_STATUS_OK = 0,
  KSTAB_STATUS_INVALID_INPUT = 1,
  /**
   * Fits did not stabilize, or the exponent `r` is too small.
   */
  KSTAB_STATUS_NOT_STABILIZED = 2,
  KSTAB_STATUS_CROSS_CHECK_FAILED = 3,
  KSTAB_STATUS_NULL_POINTER = 4,
  KSTAB_STATUS_INTERNAL = 5,
} KstabStatus;

/**
 * Opaque validated flag ideal, bound to the variety it was parsed against.
 */
typedef struct KstabFlagIdeal KstabFlagIdeal;

/**
 * Opaque polarized toric variety.
 */
typedef struct KstabVariety KstabVariety;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after success).
 * The pointer stays valid until the next call on this thread.
 */
const char *kstab_last_error(void);

/**
 * Library version, static storage.
 */
const char *kstab_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void kstab_string_free(char *s);

/**
 * Parses a variety descriptor such as
 * `{"type":"projective_space","n":2,"d":2}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
KstabStatus kstab_variety_from_json(const char *json, KstabVariety **out);

/**
 * # Safety
 * `v` must come from [`kstab_variety_from_json`] and not have been freed.
 */
void kstab_variety_free(KstabVariety *v);

/**
 * # Safety
 * Pointers must be valid.
 */
KstabStatus kstab_variety_dim(const KstabVariety *v, size_t *out);

/**
 * Number of lattice points of `k·P`.
 *
 * # Safety
 * Pointers must be valid.
 */
KstabStatus kstab_ehrhart_count(const KstabVariety *v, uint64_t k, uint64_t *out);

/**
 * `(Lⁿ)` and `(L^{n−1}.K_X)`.
 *
 * # Safety
 * Pointers must be valid.
 */
KstabStatus kstab_intersection_numbers(const KstabVariety *v, int64_t *top, int64_t *canonical);

/**
 * Parses and validates a flag ideal such as
 * `{"N":1,"mode":"chart","ideals":[{"gens":[[2]]}]}` against `v`.
 *
 * # Safety
 * Pointers must be valid; `json` NUL-terminated.
 */
KstabStatus kstab_flag_ideal_from_json(const KstabVariety *v,
                                       const char *json,
                                       KstabFlagIdeal **out);

/**
 * # Safety
 * `f` must come from [`kstab_flag_ideal_from_json`] and not have been freed.
 */
void kstab_flag_ideal_free(KstabFlagIdeal *f);

/**
 * Whether the flag ideal is in Cox mode (1) or chart mode (0).
 *
 * # Safety
 * Pointers must be valid.
 */
KstabStatus kstab_flag_ideal_is_cox(const KstabFlagIdeal *f, int32_t *out);

/**
 * Counting-route invariant at exponent `r` as a `"p/q"` string.
 *
 * # Safety
 * Pointers must be valid; `f` must have been parsed against `v`.
 */
KstabStatus kstab_df_counting(const KstabVariety *v,
                              const KstabFlagIdeal *f,
                              uint32_t r,
                              char **out);

/**
 * Intersection-route decomposition at exponent `r` as JSON.
 *
 * # Safety
 * Pointers must be valid; `f` must have been parsed against `v`.
 */
KstabStatus kstab_df_intersection_json(const KstabVariety *v,
                                       const KstabFlagIdeal *f,
                                       uint32_t r,
                                       char **out);

/**
 * Runs a complete `compute` job document and returns the JSON output. On
 * a failed job the output holds the error payload and the status mirrors
 * the CLI exit code.
 *
 * # Safety
 * `job` must be NUL-terminated and `out` valid.
 */
KstabStatus kstab_compute_json(const char *job, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KSTAB_H */
