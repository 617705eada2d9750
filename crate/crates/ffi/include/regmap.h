#ifndef REGMAP_H
#define REGMAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Outcome of a call.
typedef enum RegmapStatus {
  REGMAP_STATUS_OK = 0,
  // A required pointer argument was null.
  REGMAP_STATUS_NULL_POINTER = 1,
  // An argument is out of range or malformed (bad UTF-8, short buffer).
  REGMAP_STATUS_INVALID_ARGUMENT = 2,
  // The arrays are not permutations of the same degree.
  REGMAP_STATUS_NOT_PERMUTATION = 3,
  // `⟨x, y⟩` is not transitive on the darts.
  REGMAP_STATUS_NOT_TRANSITIVE = 4,
  // `⟨x, y⟩` is transitive but not regular.
  REGMAP_STATUS_NOT_REGULAR = 5,
  // Any other structural violation of the map axioms.
  REGMAP_STATUS_INVALID_MAP = 6,
  // JSON text could not be parsed as a map.
  REGMAP_STATUS_PARSE = 7,
  // The two maps have different types.
  REGMAP_STATUS_TYPE_MISMATCH = 8,
  // The requested object would exceed a size limit.
  REGMAP_STATUS_TOO_LARGE = 9,
  // No catalog entry has that name.
  REGMAP_STATUS_NOT_FOUND = 10,
  // A Rust panic was caught; this is a bug.
  REGMAP_STATUS_INTERNAL = 99,
} RegmapStatus;

// An orientably-regular map. Opaque to C.
typedef struct RegmapMap RegmapMap;

// Vertex, edge and face counts of a map.
typedef struct RegmapCensus {
  uint64_t darts;
  uint64_t vertices;
  uint64_t edges;
  uint64_t faces;
  int64_t euler_characteristic;
  uint64_t genus;
} RegmapCensus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null if none. The pointer
// stays valid until the next failing call on the same thread.
const char *regmap_last_error(void);

// Static, nul-terminated name of a status code.
const char *regmap_status_name(enum RegmapStatus status);

// Validates `darts`-element image arrays `x` and `y` (0-based) as a map.
//
// # Safety
// `x` and `y` must each point to `darts` readable `uint32_t`; `out` must be
// writable.
enum RegmapStatus regmap_map_from_arrays(size_t darts,
                                         const uint32_t *x,
                                         const uint32_t *y,
                                         struct RegmapMap **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `map` must be null or a live handle from this library, not used afterwards.
void regmap_map_free(struct RegmapMap *map);

// Independent copy of a handle.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RegmapStatus regmap_map_clone(const struct RegmapMap *map, struct RegmapMap **out);

// Number of darts.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RegmapStatus regmap_map_darts(const struct RegmapMap *map, size_t *out);

// Copies the images of `x` (`which == 0`) or `y` (`which == 1`) into `buf`,
// which must hold at least as many entries as the map has darts.
//
// # Safety
// `map` must be a live handle and `buf` must have `len` writable entries.
enum RegmapStatus regmap_map_generator(const struct RegmapMap *map,
                                       uint32_t which,
                                       uint32_t *buf,
                                       size_t len);

// Type `{m, n}`: face length and valency.
//
// # Safety
// `map` must be a live handle; `m` and `n` must be writable.
enum RegmapStatus regmap_map_type(const struct RegmapMap *map, uint64_t *m, uint64_t *n);

// Dart, vertex, edge and face counts with Euler characteristic and genus.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RegmapStatus regmap_map_census(const struct RegmapMap *map, struct RegmapCensus *out);

// Whether the map admits an orientation-reversing automorphism.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RegmapStatus regmap_map_is_reflexible(const struct RegmapMap *map, bool *out);

// The dual map (generators swapped).
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RegmapStatus regmap_map_dual(const struct RegmapMap *map, struct RegmapMap **out);

// The mirror image (both generators inverted).
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RegmapStatus regmap_map_mirror(const struct RegmapMap *map, struct RegmapMap **out);

// Parallel product of two maps of the same type. `limit` bounds the pair
// space `darts(a) * darts(b)`; 0 selects the library default.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum RegmapStatus regmap_parallel_product(const struct RegmapMap *a,
                                          const struct RegmapMap *b,
                                          uint64_t limit,
                                          struct RegmapMap **out);

// Index of the parallel product's group in the direct product.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum RegmapStatus regmap_product_index(const struct RegmapMap *a,
                                       const struct RegmapMap *b,
                                       uint64_t *out);

// Whether `big` is a smooth cover of `small`.
//
// # Safety
// Both must be live handles; `out` must be writable.
enum RegmapStatus regmap_is_smooth_cover(const struct RegmapMap *big,
                                         const struct RegmapMap *small,
                                         bool *out);

// The torus map `{4,4}_(b,c)` (`square == true`) or `{3,6}_(b,c)`.
//
// # Safety
// `out` must be writable.
enum RegmapStatus regmap_torus(bool square, uint64_t b, uint64_t c, struct RegmapMap **out);

// A map from the built-in catalog by name.
//
// # Safety
// `name` must be a nul-terminated string; `out` must be writable.
enum RegmapStatus regmap_catalog_get(const char *name, struct RegmapMap **out);

// Parses and validates a map from its JSON text.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum RegmapStatus regmap_map_from_json(const char *json, struct RegmapMap **out);

// Canonical JSON text of a map. Release with [`regmap_string_free`].
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RegmapStatus regmap_map_to_json(const struct RegmapMap *map, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library, not used afterwards.
void regmap_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGMAP_H */
