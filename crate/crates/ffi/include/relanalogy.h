#ifndef RELANALOGY_H
#define RELANALOGY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RaStatus {
  RA_STATUS_OK = 0,
  RA_STATUS_NULL_POINTER = 1,
  RA_STATUS_INVALID_UTF8 = 2,
  RA_STATUS_PARSE = 3,
  RA_STATUS_INVALID = 4,
  RA_STATUS_PANIC = 5,
} RaStatus;

/**
 * Classification written by [`ra_parse_schema`].
 */
typedef enum RaTacticKind {
  RA_TACTIC_KIND_SCHEMA = 0,
  RA_TACTIC_KIND_SHORTCUT = 1,
  RA_TACTIC_KIND_UNPARSEABLE = 2,
} RaTacticKind;

/**
 * Opaque match result.
 */
typedef struct RaMatchResult RaMatchResult;

/**
 * Opaque relational network.
 */
typedef struct RaNetwork RaNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ra_last_error_message(void);

/**
 * Builds a network from one network-record JSON object.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a writable pointer.
 */
enum RaStatus ra_network_from_json(const char *json, struct RaNetwork **out);

/**
 * Extracts the chess relation network of a FEN position.
 *
 * # Safety
 * `fen` and `id` must be nul-terminated strings and `out` writable.
 */
enum RaStatus ra_chess_network_from_fen(const char *fen, const char *id, struct RaNetwork **out);

/**
 * Extracts the network of a serialized proof state
 * (`name : type` lines, then `⊢ goal` lines).
 *
 * # Safety
 * `state` and `id` must be nul-terminated strings and `out` writable.
 */
enum RaStatus ra_proof_network_from_text(const char *state, const char *id, struct RaNetwork **out);

/**
 * # Safety
 * `net` must be null or a handle from this library, not yet freed.
 */
void ra_network_free(struct RaNetwork *net);

/**
 * # Safety
 * `net` must be a live handle and `out` writable.
 */
enum RaStatus ra_network_entity_count(const struct RaNetwork *net, size_t *out);

/**
 * # Safety
 * `net` must be a live handle and `out` writable.
 */
enum RaStatus ra_network_relation_count(const struct RaNetwork *net, size_t *out);

/**
 * Serializes the network as a network-record JSON object.
 *
 * # Safety
 * `net` must be a live handle and `out` writable. Free the string with
 * [`ra_string_free`].
 */
enum RaStatus ra_network_to_json(const struct RaNetwork *net, char **out);

/**
 * Runs the multi-restart matcher with default iteration cap and unit
 * weights. `restarts` must be at least 1.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum RaStatus ra_match(const struct RaNetwork *a,
                       const struct RaNetwork *b,
                       size_t restarts,
                       uint64_t seed,
                       struct RaMatchResult **out);

/**
 * # Safety
 * `r` must be null or a handle from this library, not yet freed.
 */
void ra_match_result_free(struct RaMatchResult *r);

/**
 * Raw and normalized score.
 *
 * # Safety
 * `r` must be a live handle; `raw` and `normalized` writable.
 */
enum RaStatus ra_match_result_score(const struct RaMatchResult *r, double *raw, double *normalized);

/**
 * Number of `(source, target)` pairs in the assignment.
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum RaStatus ra_match_result_pair_count(const struct RaMatchResult *r, size_t *out);

/**
 * The `index`-th assignment pair, in ascending source order.
 *
 * # Safety
 * `r` must be a live handle; `source` and `target` writable.
 */
enum RaStatus ra_match_result_pair(const struct RaMatchResult *r,
                                   size_t index,
                                   size_t *source,
                                   size_t *target);

/**
 * Classifies a tactic string. For a schema, `key_out` receives
 * `head|arity|with|lemma`; for a shortcut, the identifier; otherwise null.
 *
 * # Safety
 * `tactic` must be a nul-terminated string; `kind_out` and `key_out`
 * writable. Free a non-null key with [`ra_string_free`].
 */
enum RaStatus ra_parse_schema(const char *tactic, enum RaTacticKind *kind_out, char **key_out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void ra_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELANALOGY_H */
