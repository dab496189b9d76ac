#ifndef LINKAGE_MORSE_H
#define LINKAGE_MORSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LmStatus {
  LM_STATUS_OK = 0,
  LM_STATUS_NULL_POINTER = 1,
  LM_STATUS_BAD_PARITY = 2,
  LM_STATUS_INVALID_ARGUMENT = 3,
  LM_STATUS_OUT_OF_RANGE = 4,
  LM_STATUS_BUFFER_TOO_SMALL = 5,
  LM_STATUS_NUMERIC_FAILURE = 6,
  LM_STATUS_INTERNAL = 7,
} LmStatus;

/**
 * Opaque catalog handle.
 */
typedef struct LmCatalog LmCatalog;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *lm_last_error(void);

/**
 * Builds the catalog of the equilateral `n`-gon.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LmStatus lm_catalog_build(size_t n, struct LmCatalog **out);

/**
 * Builds the catalog for lengths `1 + eps_i`, `eps_i` uniform in
 * `[-epsilon, epsilon]` drawn from `seed`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LmStatus lm_catalog_build_perturbed(size_t n,
                                         double epsilon,
                                         uint64_t seed,
                                         struct LmCatalog **out);

/**
 * # Safety
 * `catalog` must be null or a handle from `lm_catalog_build*` not yet freed.
 */
void lm_catalog_free(struct LmCatalog *catalog);

/**
 * Number of entries; 0 for a null handle.
 *
 * # Safety
 * `catalog` must be null or a live handle.
 */
size_t lm_catalog_len(const struct LmCatalog *catalog);

/**
 * # Safety
 * `catalog` must be a live handle and `omega` writable.
 */
enum LmStatus lm_entry_omega(const struct LmCatalog *catalog, size_t index, int64_t *omega);

/**
 * Copies the `n` signs (+1/-1) of an entry into `signs`.
 *
 * # Safety
 * `catalog` must be a live handle and `signs` valid for `len` writes.
 */
enum LmStatus lm_entry_signs(const struct LmCatalog *catalog,
                             size_t index,
                             int8_t *signs,
                             size_t len);

/**
 * # Safety
 * `catalog` must be a live handle and `index_out` writable.
 */
enum LmStatus lm_entry_index(const struct LmCatalog *catalog, size_t index, uint32_t *index_out);

/**
 * # Safety
 * `catalog` must be a live handle and `value` writable.
 */
enum LmStatus lm_entry_s_value(const struct LmCatalog *catalog, size_t index, double *value);

/**
 * # Safety
 * `catalog` must be a live handle and `radius` writable.
 */
enum LmStatus lm_entry_radius(const struct LmCatalog *catalog, size_t index, double *radius);

/**
 * Copies the vertices as `n` consecutive `x, y, z` triples.
 *
 * # Safety
 * `catalog` must be a live handle and `xyz` valid for `len` writes.
 */
enum LmStatus lm_entry_vertices(const struct LmCatalog *catalog,
                                size_t index,
                                double *xyz,
                                size_t len);

/**
 * Negative-eigenvalue count of the projected Hessian at an entry.
 *
 * # Safety
 * `catalog` must be a live handle and `negatives` writable.
 */
enum LmStatus lm_numeric_index(const struct LmCatalog *catalog, size_t index, uint32_t *negatives);

/**
 * Serializes the catalog; free the result with [`lm_string_free`].
 *
 * # Safety
 * `catalog` must be a live handle and `json` writable.
 */
enum LmStatus lm_catalog_to_json(const struct LmCatalog *catalog, char **json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void lm_string_free(char *s);

/**
 * Sets `*perfect` to whether the Morse census matches the decorated Betti
 * numbers for `n` edges.
 *
 * # Safety
 * `perfect` must be writable.
 */
enum LmStatus lm_verify_perfect(size_t n, bool *perfect);

/**
 * Writes the decorated Betti numbers `b_0 .. b_dim` into `betti` and the
 * count into `*written`. With `betti` null only `*written` is set.
 *
 * # Safety
 * `written` must be writable and `betti` null or valid for `len` writes.
 */
enum LmStatus lm_betti_decorated(size_t n, uint64_t *betti, size_t len, size_t *written);

/**
 * Static description of a status code.
 */
const char *lm_status_str(enum LmStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINKAGE_MORSE_H */
