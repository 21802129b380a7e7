#ifndef SLICECOUNT_H
#define SLICECOUNT_H

#include <stddef.h>
#include <stdint.h>

typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_ARGUMENT = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  SC_STATUS_PARSE = 3,
  SC_STATUS_RESOURCE = 4,
  SC_STATUS_INTERNAL = 5,
} ScStatus;

typedef struct ScCount ScCount;

typedef struct ScGraph ScGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next
 * failing call on the same thread.
 */
const char *sc_last_error(void);

/**
 * Parses a digraph in edge-list format. The ordering starts as the
 * identity.
 *
 * # Safety
 * `edge_list` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScStatus sc_graph_parse(const char *edge_list, struct ScGraph **out);

/**
 * # Safety
 * `g` must come from [`sc_graph_parse`] and not be used afterwards.
 */
void sc_graph_free(struct ScGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
uintptr_t sc_graph_vertex_count(const struct ScGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
uintptr_t sc_graph_edge_count(const struct ScGraph *g);

/**
 * Replaces the vertex ordering. `ordering` lists every vertex once.
 *
 * # Safety
 * `g` must be a live graph handle and `ordering` must point to `len`
 * readable values.
 */
enum ScStatus sc_graph_set_ordering(struct ScGraph *g, const uintptr_t *ordering, uintptr_t len);

/**
 * Replaces the ordering by one of minimum directed vertex separation
 * number and stores that number in `dvsn`.
 *
 * # Safety
 * `g` must be a live graph handle; `dvsn` may be null.
 */
enum ScStatus sc_graph_search_ordering(struct ScGraph *g, uintptr_t *dvsn);

/**
 * Writes the current ordering into `buf`, which holds `len` values.
 *
 * # Safety
 * `g` must be a live graph handle and `buf` must point to `len` writable
 * values.
 */
enum ScStatus sc_graph_ordering(const struct ScGraph *g, uintptr_t *buf, uintptr_t len);

/**
 * Exact zig-zag number of the current ordering.
 *
 * # Safety
 * `g` must be a live graph handle and `out` a valid pointer.
 */
enum ScStatus sc_graph_zigzag(const struct ScGraph *g, uintptr_t *out);

/**
 * Counts subgraphs with `l` vertices (any size when `l < 0`) that are
 * unions of `k` directed paths of zig-zag number at most `z` under the
 * graph's ordering and satisfy `query`: a preset name or formula text.
 *
 * # Safety
 * `g` must be a live graph handle, `query` a NUL-terminated string and
 * `out` a valid pointer.
 */
enum ScStatus sc_count(const struct ScGraph *g,
                       const char *query,
                       uintptr_t k,
                       uintptr_t z,
                       int64_t l,
                       struct ScCount **out);

/**
 * Stores the count in `out` if it fits in 64 bits.
 *
 * # Safety
 * `c` must be a live count handle and `out` a valid pointer.
 */
enum ScStatus sc_count_u64(const struct ScCount *c, uint64_t *out);

/**
 * Decimal digits of the count. Release with [`sc_string_free`].
 *
 * # Safety
 * `c` must be a live count handle.
 */
char *sc_count_to_string(const struct ScCount *c);

/**
 * # Safety
 * `c` must come from [`sc_count`] and not be used afterwards.
 */
void sc_count_free(struct ScCount *c);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void sc_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SLICECOUNT_H */
