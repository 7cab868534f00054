#ifndef PHASELAB_H
#define PHASELAB_H

/* Generated by cbindgen from phaselab-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum PhaselabStatus {
  PHASELAB_STATUS_OK = 0,
  /**
   * A check ran and found a counterexample.
   */
  PHASELAB_STATUS_COUNTEREXAMPLE = 1,
  /**
   * Parse, validation, or argument errors.
   */
  PHASELAB_STATUS_INVALID_INPUT = 2,
  /**
   * A search or enumeration budget was exceeded.
   */
  PHASELAB_STATUS_BUDGET_EXCEEDED = 3,
  /**
   * Null pointer or malformed UTF-8 at the boundary.
   */
  PHASELAB_STATUS_BAD_POINTER = 4,
} PhaselabStatus;

/**
 * Morphism grading discipline.
 */
typedef enum PhaselabMode {
  PHASELAB_MODE_LAX = 0,
  PHASELAB_MODE_STRICT = 1,
} PhaselabMode;

/**
 * Opaque handle to a parsed, validated phase (plus its optional order
 * block).
 */
typedef struct PhaselabPhase PhaselabPhase;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or NULL when none was recorded.
 * The caller owns the returned string.
 */
char *phaselab_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a phaselab function and not
 * yet freed; NULL is ignored.
 */
void phaselab_string_free(char *s);

/**
 * Parse a `.phase` document. On success writes a handle to `out`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum PhaselabStatus phaselab_parse(const char *text, struct PhaselabPhase **out);

/**
 * Release a phase handle.
 *
 * # Safety
 * `p` must come from this library and not be freed twice; NULL is ignored.
 */
void phaselab_phase_free(struct PhaselabPhase *p);

/**
 * Number of carrier elements.
 *
 * # Safety
 * `p` must be a live handle from this library.
 */
uintptr_t phaselab_element_count(const struct PhaselabPhase *p);

/**
 * Render the phase back to its canonical `.phase` text.
 *
 * # Safety
 * `p` must be a live handle from this library.
 */
char *phaselab_render(const struct PhaselabPhase *p);

/**
 * Structural digest (isomorphism-invariant hex string).
 *
 * # Safety
 * `p` must be a live handle from this library.
 */
char *phaselab_digest(const struct PhaselabPhase *p);

/**
 * Stratification, admissibility flags, and invariants as canonical JSON.
 *
 * # Safety
 * `p` must be a live handle from this library.
 */
char *phaselab_analyze_json(const struct PhaselabPhase *p);

/**
 * Boundary of the phase as a new handle.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum PhaselabStatus phaselab_boundary(const struct PhaselabPhase *p, struct PhaselabPhase **out);

/**
 * Completion of the phase: a new handle plus (optionally) the JSON sidecar
 * describing the collapsed partition.
 *
 * # Safety
 * `p` must be a live handle, `out` a valid pointer; `json_out` may be NULL.
 */
enum PhaselabStatus phaselab_complete(const struct PhaselabPhase *p,
                                      struct PhaselabPhase **out,
                                      char **json_out);

/**
 * Count the morphisms from `source` into `target`.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer.
 */
enum PhaselabStatus phaselab_hom_count(const struct PhaselabPhase *source,
                                       const struct PhaselabPhase *target,
                                       enum PhaselabMode mode,
                                       uint64_t budget,
                                       uint64_t *out);

/**
 * Strict isomorphism search; writes 1 or 0 to `out`.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer.
 */
enum PhaselabStatus phaselab_isomorphic(const struct PhaselabPhase *left,
                                        const struct PhaselabPhase *right,
                                        bool *out);

/**
 * Run one theorem check (by its id string, e.g. "RIGIDITY") over an array
 * of phase handles; writes the verdict JSON to `json_out`. Returns
 * `Counterexample` when the check found one.
 *
 * # Safety
 * `theorem` must be a valid NUL-terminated string, `phases` an array of
 * `len` live handles, and `json_out` a valid pointer.
 */
enum PhaselabStatus phaselab_run_check(const char *theorem,
                                       const struct PhaselabPhase *const *phases,
                                       uintptr_t len,
                                       char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHASELAB_H */
