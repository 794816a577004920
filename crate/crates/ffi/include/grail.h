#ifndef GRAIL_H
#define GRAIL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Exit of a program outcome.
 */
typedef enum GrailExit {
  GRAIL_EXIT_OK = 0,
  GRAIL_EXIT_ER = 1,
} GrailExit;

/**
 * Result code of every fallible call.
 */
typedef enum GrailStatus {
  GRAIL_STATUS_OK = 0,
  GRAIL_STATUS_NULL_ARGUMENT = 1,
  GRAIL_STATUS_INVALID_UTF8 = 2,
  /**
   * Parse or load failure; the message carries `file:line:col`.
   */
  GRAIL_STATUS_LOAD = 3,
  /**
   * The input was well-formed but could not be evaluated.
   */
  GRAIL_STATUS_EVAL = 4,
  GRAIL_STATUS_INDEX_OUT_OF_RANGE = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  GRAIL_STATUS_INTERNAL = 6,
} GrailStatus;

/**
 * Proof checking verdict.
 */
typedef enum GrailVerdict {
  GRAIL_VERDICT_VALID = 0,
  GRAIL_VERDICT_VALID_UP_TO_BOUND = 1,
  GRAIL_VERDICT_REJECTED = 2,
} GrailVerdict;

/**
 * A host graph.
 */
typedef struct GrailGraph GrailGraph;

/**
 * The ok and er result sets of a program run.
 */
typedef struct GrailOutcomes GrailOutcomes;

/**
 * Rule definitions and named conditions.
 */
typedef struct GrailWorkspace GrailWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next grail call on the same thread.
 */
const char *grail_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void grail_string_free(char *s);

/**
 * Creates a workspace, optionally preloaded with the built-in rules
 * (`init`, `colour`, `delete`, ...).
 */
struct GrailWorkspace *grail_workspace_new(bool with_builtins);

/**
 * # Safety
 * `ws` must be null or a handle from [`grail_workspace_new`].
 */
void grail_workspace_free(struct GrailWorkspace *ws);

/**
 * Loads a `.grs` rule file or a `.cond` definitions file.
 *
 * # Safety
 * `ws` must be a live workspace handle and `path` a nul-terminated string.
 */
enum GrailStatus grail_workspace_load_file(struct GrailWorkspace *ws, const char *path);

/**
 * Adds rule declarations given as source text.
 *
 * # Safety
 * `ws` must be a live workspace handle and `src` a nul-terminated string.
 */
enum GrailStatus grail_workspace_add_rules(struct GrailWorkspace *ws, const char *src);

/**
 * Parses a graph from text or from a file path.
 *
 * # Safety
 * `ws` must be a live workspace handle, `src` a nul-terminated string and
 * `out` writable.
 */
enum GrailStatus grail_graph_parse(struct GrailWorkspace *ws,
                                   const char *src,
                                   struct GrailGraph **out);

/**
 * # Safety
 * `g` must be null or a graph handle from this library.
 */
void grail_graph_free(struct GrailGraph *g);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t grail_graph_node_count(const struct GrailGraph *g);

/**
 * Number of edges, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t grail_graph_edge_count(const struct GrailGraph *g);

/**
 * Renders a graph in the textual graph syntax.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum GrailStatus grail_graph_to_string(const struct GrailGraph *g, char **out);

/**
 * Decides whether a graph satisfies a closed condition.
 *
 * # Safety
 * Handles must be live, `cond` nul-terminated and `out` writable.
 */
enum GrailStatus grail_satisfies(struct GrailWorkspace *ws,
                                 const struct GrailGraph *g,
                                 const char *cond,
                                 bool *out);

/**
 * Weakest liberal postcondition of a condition over a rule set given as
 * comma-separated rule names.
 *
 * # Safety
 * `ws` must be live, the strings nul-terminated and `out` writable.
 */
enum GrailStatus grail_wpost(struct GrailWorkspace *ws,
                             const char *rules,
                             const char *cond,
                             char **out);

/**
 * Computes every result of running a program on a graph. `max_steps` of 0
 * keeps the default budget.
 *
 * # Safety
 * Handles must be live, `program` nul-terminated and `out` writable.
 */
enum GrailStatus grail_outcomes(struct GrailWorkspace *ws,
                                const char *program,
                                const struct GrailGraph *g,
                                size_t max_steps,
                                struct GrailOutcomes **out);

/**
 * # Safety
 * `o` must be null or a handle from [`grail_outcomes`].
 */
void grail_outcomes_free(struct GrailOutcomes *o);

/**
 * Number of results with the given exit, or 0 for a null handle.
 *
 * # Safety
 * `o` must be null or a live outcomes handle.
 */
size_t grail_outcomes_len(const struct GrailOutcomes *o, enum GrailExit exit);

/**
 * Whether exploration hit the step or size budget.
 *
 * # Safety
 * `o` must be null or a live outcomes handle.
 */
bool grail_outcomes_truncated(const struct GrailOutcomes *o);

/**
 * Copies out the `index`-th result graph with the given exit.
 *
 * # Safety
 * `o` must be a live outcomes handle and `out` writable.
 */
enum GrailStatus grail_outcomes_get(const struct GrailOutcomes *o,
                                    enum GrailExit exit,
                                    size_t index,
                                    struct GrailGraph **out);

/**
 * Checks a proof script file. `max_nodes` bounds the graphs used for
 * non-syntactic side conditions; 0 keeps the default.
 *
 * # Safety
 * `ws` must be live, `path` nul-terminated and `out` writable.
 */
enum GrailStatus grail_check_proof(struct GrailWorkspace *ws,
                                   const char *path,
                                   size_t max_nodes,
                                   enum GrailVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAIL_H */
