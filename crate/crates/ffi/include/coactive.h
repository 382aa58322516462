#ifndef COACTIVE_H
#define COACTIVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CoactiveStatus {
  COACTIVE_STATUS_OK = 0,
  COACTIVE_STATUS_NULL_POINTER = 1,
  COACTIVE_STATUS_INVALID_UTF8 = 2,
  COACTIVE_STATUS_INVALID_ARGUMENT = 3,
  COACTIVE_STATUS_WRONG_STATE = 4,
  COACTIVE_STATUS_INFEASIBLE = 5,
  COACTIVE_STATUS_INVALID_CRITIQUE = 6,
  COACTIVE_STATUS_DUPLICATE_CRITIQUE = 7,
  COACTIVE_STATUS_INTERNAL = 8,
  COACTIVE_STATUS_PANIC = 9,
} CoactiveStatus;

/**
 * Session phase, mirroring the service's status names.
 */
typedef enum CoactivePhase {
  COACTIVE_PHASE_SUGGESTING = 0,
  COACTIVE_PHASE_AWAITING_IMPROVEMENT = 1,
  COACTIVE_PHASE_AWAITING_CRITIQUE = 2,
  COACTIVE_PHASE_DONE = 3,
} CoactivePhase;

typedef enum CoactiveNext {
  COACTIVE_NEXT_CRITIQUE_NEEDED = 0,
  COACTIVE_NEXT_SUGGESTION_READY = 1,
  COACTIVE_NEXT_DONE = 2,
} CoactiveNext;

typedef enum CoactiveFormat {
  COACTIVE_FORMAT_CSV = 0,
  COACTIVE_FORMAT_JSON = 1,
} CoactiveFormat;

/**
 * Opaque session handle.
 */
typedef struct CoactiveSession CoactiveSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *coactive_last_error(void);

/**
 * Library version as a static string.
 */
const char *coactive_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void coactive_string_free(char *s);

/**
 * Creates a trip session from a JSON domain spec such as
 * `{"kind":"trip","horizon":6,"seed":1}`.
 *
 * # Safety
 * `domain_json` must be a nul-terminated string; `out` must be writable.
 */
enum CoactiveStatus coactive_session_new(const char *domain_json, struct CoactiveSession **out);

/**
 * # Safety
 * `s` must be null or a handle from this library not freed yet.
 */
void coactive_session_free(struct CoactiveSession *s);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum CoactiveStatus coactive_session_phase(const struct CoactiveSession *s,
                                           enum CoactivePhase *out);

/**
 * Writes the current suggestion as a JSON array of city ids.
 *
 * # Safety
 * `s` must be a live handle; `route_json` must be writable. The returned
 * string is owned by the caller.
 */
enum CoactiveStatus coactive_session_suggest(struct CoactiveSession *s, char **route_json);

/**
 * # Safety
 * `s` must be a live handle; `route_json` a nul-terminated JSON array;
 * `next` writable.
 */
enum CoactiveStatus coactive_session_improve(struct CoactiveSession *s,
                                             const char *route_json,
                                             enum CoactiveNext *next);

/**
 * Applies a critique expression; writes the new feature's catalog index.
 *
 * # Safety
 * `s` must be a live handle; `expression` nul-terminated; `index` writable.
 */
enum CoactiveStatus coactive_session_critique(struct CoactiveSession *s,
                                              const char *expression,
                                              size_t *index);

/**
 * Serializes the full session state, for persistence by the caller.
 *
 * # Safety
 * `s` must be a live handle; `out` writable.
 */
enum CoactiveStatus coactive_session_to_json(const struct CoactiveSession *s, char **out);

/**
 * Restores a session written by [`coactive_session_to_json`].
 *
 * # Safety
 * `state_json` must be nul-terminated; `out` writable.
 */
enum CoactiveStatus coactive_session_from_json(const char *state_json,
                                               struct CoactiveSession **out);

/**
 * Runs a simulated experiment from a JSON config and writes the results
 * table as CSV or JSON. `workers` of 0 means one thread.
 *
 * # Safety
 * `config_json` must be nul-terminated; `out` writable.
 */
enum CoactiveStatus coactive_run_experiment(const char *config_json,
                                            uint32_t workers,
                                            enum CoactiveFormat format,
                                            char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COACTIVE_H */
