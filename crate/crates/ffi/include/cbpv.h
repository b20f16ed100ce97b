#ifndef CBPV_H
#define CBPV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CbpvStatus {
  CBPV_STATUS_OK = 0,
  /**
   * The check ran and found a counterexample or violation.
   */
  CBPV_STATUS_CHECK_FAILED = 1,
  CBPV_STATUS_NULL_ARGUMENT = 2,
  CBPV_STATUS_INVALID_UTF8 = 3,
  /**
   * Malformed input: JSON, syntax, types or configuration.
   */
  CBPV_STATUS_INVALID_INPUT = 4,
  /**
   * A panic was caught at the boundary.
   */
  CBPV_STATUS_INTERNAL = 5,
} CbpvStatus;

/**
 * A glued model built from a gluing configuration.
 */
typedef struct CbpvGlue CbpvGlue;

/**
 * A model built from a configuration.
 */
typedef struct CbpvModel CbpvModel;

/**
 * A parsed signature.
 */
typedef struct CbpvSignature CbpvSignature;

/**
 * The last error on this thread as a fresh string, or null if there is none.
 */
char *cbpv_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cbpv_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CbpvStatus cbpv_signature_from_json(const char *json, struct CbpvSignature **out);

/**
 * # Safety
 * `sig` must come from `cbpv_signature_from_json` and not have been freed.
 */
void cbpv_signature_free(struct CbpvSignature *sig);

/**
 * Infers the type of a closed program; `out_type` receives it printed.
 * An ill-typed program yields `CheckFailed`.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum CbpvStatus cbpv_typecheck(const struct CbpvSignature *sig,
                               const char *program,
                               char **out_type);

/**
 * Builds a model; `sig` may be null when the configuration declares its own signature.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum CbpvStatus cbpv_model_from_json(const char *json,
                                     const struct CbpvSignature *sig,
                                     struct CbpvModel **out);

/**
 * # Safety
 * `model` must come from `cbpv_model_from_json` and not have been freed.
 */
void cbpv_model_free(struct CbpvModel *model);

/**
 * Evaluates a closed program; `out_json` receives `{"type": …, "denotation": …}`.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum CbpvStatus cbpv_eval(const struct CbpvModel *model, const char *program, char **out_json);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CbpvStatus cbpv_glue_from_json(const char *json, struct CbpvGlue **out);

/**
 * # Safety
 * `glue` must come from `cbpv_glue_from_json` and not have been freed.
 */
void cbpv_glue_free(struct CbpvGlue *glue);

/**
 * Checks the basic lemma on a corpus (one term per line, `#` comments). The JSON
 * report is written to `out_json` whether or not the check passes.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum CbpvStatus cbpv_logrel_check(const struct CbpvGlue *glue, const char *corpus, char **out_json);

/**
 * Checks a locally indexed category, or a locally indexed functor for the fibration
 * property, within `budget` search steps. The JSON report goes to `out_json`.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum CbpvStatus cbpv_lind_check(const char *json, uint64_t budget, char **out_json);

/**
 * The library version, as a static string.
 */
const char *cbpv_version(void);

#endif  /* CBPV_H */
