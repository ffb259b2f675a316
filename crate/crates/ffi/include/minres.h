#ifndef MINRES_H
#define MINRES_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum MinresStatus {
  MINRES_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  MINRES_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  MINRES_STATUS_INVALID_UTF8 = 2,
  /**
   * The map, point or residue field text did not parse.
   */
  MINRES_STATUS_PARSE_ERROR = 3,
  /**
   * Fixed points or preimages do not split over the residue field.
   */
  MINRES_STATUS_RESIDUE_EXTENSION_REQUIRED = 4,
  /**
   * Independent computations of the same quantity disagreed.
   */
  MINRES_STATUS_CROSS_CHECK_FAILURE = 5,
  /**
   * Any other library error.
   */
  MINRES_STATUS_FAILURE = 6,
  /**
   * The library panicked; this is a bug.
   */
  MINRES_STATUS_PANIC = 7,
} MinresStatus;

/**
 * A rational map of degree at least 2 in normalized form.
 */
typedef struct MinresMap MinresMap;

/**
 * Parses a rational function such as `(z^3 - (1+t)*z^2)/(-t)` over the residue field
 * `residue` (`"Q"` or `"F<p>"`) and stores a new handle in `*out`.
 *
 * # Safety
 * `text` and `residue` are nul-terminated strings; `out` is writable.
 */
enum MinresStatus minres_map_parse(const char *text, const char *residue, struct MinresMap **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `map` is null or a live handle from [`minres_map_parse`].
 */
void minres_map_free(struct MinresMap *map);

/**
 * Degree of the map, or 0 for a null handle.
 *
 * # Safety
 * `map` is null or a live handle.
 */
uint32_t minres_map_degree(const struct MinresMap *map);

/**
 * `ordRes` at the type II point written `center,depth` (for example `"0,1/2"`), as an
 * exact rational string.
 *
 * # Safety
 * `map` is a live handle, `point` a nul-terminated string, `out` writable.
 */
enum MinresStatus minres_ordres_at(const struct MinresMap *map, const char *point, char **out);

/**
 * The crucial set with weights and reduction types, as JSON.
 *
 * # Safety
 * `map` is a live handle and `out` writable.
 */
enum MinresStatus minres_crucial_json(const struct MinresMap *map, char **out);

/**
 * The minimal resultant locus with its cross-validation certificates, as JSON.
 *
 * # Safety
 * `map` is a live handle and `out` writable.
 */
enum MinresStatus minres_min_res_loc_json(const struct MinresMap *map, char **out);

/**
 * Message for the most recent failure on this thread, or null. The pointer stays valid
 * until the next failing call on the same thread; do not free it.
 */
const char *minres_last_error(void);

/**
 * Releases a string returned through an out pointer. Null is ignored.
 *
 * # Safety
 * `s` is null or a string from this library that has not been freed.
 */
void minres_string_free(char *s);

#endif  /* MINRES_H */
