#ifndef SBC_H
#define SBC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SbcStatus {
  SBC_STATUS_OK = 0,
  SBC_STATUS_NULL_POINTER = 1,
  SBC_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, bad sizes or a list that is not a partition.
   */
  SBC_STATUS_INVALID_INPUT = 3,
  /**
   * The partition violates a precondition of the call.
   */
  SBC_STATUS_CONTRACT_VIOLATION = 4,
  /**
   * An iteration limit stopped the dynamics.
   */
  SBC_STATUS_BUDGET_EXHAUSTED = 5,
  SBC_STATUS_PANIC = 6,
} SbcStatus;

typedef enum SbcKind {
  SBC_KIND_NE = 0,
  SBC_KIND_FNE1 = 1,
  SBC_KIND_FNE2 = 2,
  SBC_KIND_FNE3 = 3,
  SBC_KIND_MSNE = 4,
  SBC_KIND_SNE = 5,
} SbcKind;

typedef enum SbcMethod {
  SBC_METHOD_FFD = 0,
  SBC_METHOD_FFD_LPT = 1,
  SBC_METHOD_BR_FNE1 = 2,
  SBC_METHOD_SNE = 3,
  SBC_METHOD_IMPROVE_FNE3 = 4,
  SBC_METHOD_IMPROVE_MSNE = 5,
} SbcMethod;

typedef struct SbcInstance SbcInstance;

typedef struct SbcPartition SbcPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *sbc_status_message(enum SbcStatus status);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *sbc_last_error(void);

/**
 * # Safety
 * `sizes` must point to `n` readable values and `out` must be writable.
 */
enum SbcStatus sbc_instance_new(const uint64_t *sizes,
                                size_t n,
                                uint64_t bin_volume,
                                struct SbcInstance **out);

/**
 * Parses `{"bin_volume": b, "sizes": [...]}`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` writable.
 */
enum SbcStatus sbc_instance_from_json(const char *json, struct SbcInstance **out);

/**
 * Number of items, 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t sbc_instance_len(const struct SbcInstance *inst);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void sbc_instance_free(struct SbcInstance *inst);

/**
 * Builds a partition from one bin label per item; labels need not be
 * contiguous.
 *
 * # Safety
 * `labels` must point to `n` readable values, `inst` be live and `out`
 * writable.
 */
enum SbcStatus sbc_partition_from_labels(const struct SbcInstance *inst,
                                         const size_t *labels,
                                         size_t n,
                                         struct SbcPartition **out);

/**
 * Parses `{"bins": [[...], ...]}` against `inst`.
 *
 * # Safety
 * `inst` must be live, `json` nul-terminated and `out` writable.
 */
enum SbcStatus sbc_partition_from_json(const struct SbcInstance *inst,
                                       const char *json,
                                       struct SbcPartition **out);

/**
 * Writes the partition as JSON; free the string with [`sbc_string_free`].
 *
 * # Safety
 * `p` must be live and `out` writable.
 */
enum SbcStatus sbc_partition_to_json(const struct SbcPartition *p, char **out);

/**
 * Number of bins, 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t sbc_partition_num_bins(const struct SbcPartition *p);

/**
 * Copies the bin index of each item into `labels[0..n]`.
 *
 * # Safety
 * `p` must be live and `labels` writable for `n` values.
 */
enum SbcStatus sbc_partition_labels(const struct SbcPartition *p, size_t *labels, size_t n);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void sbc_partition_free(struct SbcPartition *p);

/**
 * Number of covered bins.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum SbcStatus sbc_welfare(const struct SbcInstance *inst,
                           const struct SbcPartition *p,
                           size_t *out);

/**
 * Checks one equilibrium notion. `witness_json` may be null; otherwise it
 * receives the verdict as JSON, to be freed with [`sbc_string_free`].
 *
 * # Safety
 * Handles must be live, `holds` writable, `witness_json` null or writable.
 */
enum SbcStatus sbc_verify(const struct SbcInstance *inst,
                          const struct SbcPartition *p,
                          enum SbcKind kind,
                          bool *holds,
                          char **witness_json);

/**
 * Runs a construction or dynamics. `start` may be null, in which case the
 * first-fit decreasing partition is used; `max_iterations` 0 means no limit.
 *
 * # Safety
 * `inst` must be live, `start` null or live, `out` writable.
 */
enum SbcStatus sbc_solve(const struct SbcInstance *inst,
                         const struct SbcPartition *start,
                         enum SbcMethod method,
                         size_t max_iterations,
                         struct SbcPartition **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void sbc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SBC_H */
