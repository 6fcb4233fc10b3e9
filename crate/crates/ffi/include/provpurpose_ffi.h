#ifndef PROVPURPOSE_FFI_H
#define PROVPURPOSE_FFI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_POINTER = 1,
  PP_STATUS_INVALID_UTF8 = 2,
  PP_STATUS_PARSE_ERROR = 3,
  PP_STATUS_INVALID_INPUT = 4,
  PP_STATUS_EVALUATION_ERROR = 5,
  PP_STATUS_PANIC = 6,
} PpStatus;

/*
 Opaque provenance graph.
 */
typedef struct PpProvenanceGraph PpProvenanceGraph;

/*
 Opaque purpose DAG.
 */
typedef struct PpPurposeGraph PpPurposeGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. Valid until
 the next call into this library on the same thread.
 */
const char *pp_last_error(void);

/*
 Library version as a static string.
 */
const char *pp_version(void);

/*
 # Safety
 `s` must be null or a string returned by this library, freed once.
 */
void pp_string_free(char *s);

/*
 Builds a purpose DAG from `{purposes, edges, hierarchy_line}` JSON.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PpStatus pp_purpose_graph_from_json(const char *json, struct PpPurposeGraph **out);

/*
 # Safety
 `pg` must be null or a handle from [`pp_purpose_graph_from_json`], freed once.
 */
void pp_purpose_graph_free(struct PpPurposeGraph *pg);

/*
 Builds a provenance graph from `{vertices, edges}` JSON.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PpStatus pp_provenance_graph_from_json(const char *json, struct PpProvenanceGraph **out);

/*
 # Safety
 `g` must be null or a handle from [`pp_provenance_graph_from_json`], freed once.
 */
void pp_provenance_graph_free(struct PpProvenanceGraph *g);

/*
 Writes `{"valid": bool, "violations": [..]}`.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_validate(const struct PpProvenanceGraph *g, char **out);

/*
 Evaluates an internal expression. `sets_json` maps names to either
 `{HA, HP, LA, LP}` or `{AP, PP}`; the latter is split by `pg` when
 given and otherwise treated as high hierarchy. `pg` may be null.

 # Safety
 String arguments must be NUL-terminated; `pg` null or live; `out` writable.
 */
enum PpStatus pp_merge_internal(const char *expr,
                                const char *sets_json,
                                const struct PpPurposeGraph *pg,
                                char **out);

/*
 Evaluates an external expression over `[{party, AP, PP}, ..]`.
 `pg` may be null unless the expression uses precedence.

 # Safety
 String arguments must be NUL-terminated; `pg` null or live; `out` writable.
 */
enum PpStatus pp_merge_external(const char *expr,
                                const char *parties_json,
                                const struct PpPurposeGraph *pg,
                                char **out);

/*
 Runs a full decision. `request_json` is a request document and
 `parties_json` an array of party (or single-policy) documents.

 # Safety
 Handles must be live; strings NUL-terminated; `out` writable.
 */
enum PpStatus pp_decide(const struct PpProvenanceGraph *graph,
                        const struct PpPurposeGraph *pg,
                        const char *request_json,
                        const char *parties_json,
                        const char *external_expr,
                        char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROVPURPOSE_FFI_H */
