#ifndef NETOBS_H
#define NETOBS_H

/* Generated by cbindgen from netobs-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code for every fallible entry point.
 */
typedef enum NetobsStatus {
  NETOBS_STATUS_OK = 0,
  NETOBS_STATUS_INVALID_INPUT = 1,
  NETOBS_STATUS_UNDEFINED = 2,
  NETOBS_STATUS_BUDGET = 3,
  NETOBS_STATUS_IO = 4,
  NETOBS_STATUS_NULL_ARGUMENT = 5,
  NETOBS_STATUS_PANIC = 6,
} NetobsStatus;

/**
 * Synthetic graph family for netobs_graph_generate.
 */
typedef enum NetobsFamily {
  NETOBS_FAMILY_COMPLETE = 0,
  NETOBS_FAMILY_ERDOS_RENYI = 1,
  NETOBS_FAMILY_BARABASI_ALBERT = 2,
  NETOBS_FAMILY_WATTS_STROGATZ = 3,
} NetobsFamily;

/**
 * What is being observed.
 */
typedef enum NetobsTarget {
  NETOBS_TARGET_EDGE = 0,
  NETOBS_TARGET_NODE = 1,
} NetobsTarget;

/**
 * Whole-graph average or per-node average.
 */
typedef enum NetobsLevel {
  NETOBS_LEVEL_GLOBAL = 0,
  NETOBS_LEVEL_LOCAL = 1,
} NetobsLevel;

/**
 * Opaque graph handle.
 */
typedef struct NetobsGraph NetobsGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Never null; empty
 * before the first failure. Owned by the library, do not free.
 */
const char *netobs_last_error(void);

/**
 * Reads an edge-list file (`u v` per line, `#` comments, optional `# n=`
 * directive) into a new graph handle.
 * # Safety
 * `path` must point to a NUL-terminated string; `out` must be a valid
 * pointer. The returned handle must be released with netobs_graph_free.
 */
enum NetobsStatus netobs_graph_read_file(const char *path, struct NetobsGraph **out);

/**
 * Generates a synthetic graph at a target density (parameters are chosen
 * the same way as the CLI's `generate --density`).
 * # Safety
 * `out` must be a valid pointer. The returned handle must be released
 * with netobs_graph_free.
 */
enum NetobsStatus netobs_graph_generate(enum NetobsFamily family,
                                        size_t n,
                                        double density,
                                        uint64_t seed,
                                        struct NetobsGraph **out);

/**
 * Frees a graph handle. Null is a no-op.
 * # Safety
 * `graph` must be a handle from this library, freed at most once.
 */
void netobs_graph_free(struct NetobsGraph *graph);

/**
 * Node count, or 0 for a null handle.
 * # Safety
 * `graph` must be null or a live handle from this library.
 */
size_t netobs_graph_node_count(const struct NetobsGraph *graph);

/**
 * Edge count, or 0 for a null handle.
 * # Safety
 * `graph` must be null or a live handle from this library.
 */
size_t netobs_graph_edge_count(const struct NetobsGraph *graph);

/**
 * Edge density 2|E|/(n(n-1)); NETOBS_STATUS_UNDEFINED when n < 2.
 * # Safety
 * `graph` must be null or a live handle; `out` must be a valid pointer.
 */
enum NetobsStatus netobs_graph_density(const struct NetobsGraph *graph, double *out);

/**
 * Exact 1-hop observability for n_c uniformly compromised nodes.
 * Local metrics are undefined at n_c = n.
 * # Safety
 * `graph` must be null or a live handle; `out` must be a valid pointer.
 */
enum NetobsStatus netobs_exact_observability(const struct NetobsGraph *graph,
                                             enum NetobsTarget target,
                                             enum NetobsLevel level,
                                             size_t n_c,
                                             double *out);

/**
 * Monte-Carlo estimate of a k-hop metric over `trials` uniform compromised
 * sets of size n_c. Writes the mean and the standard error of the mean.
 * # Safety
 * `graph` must be null or a live handle; `out_mean` and `out_stderr`
 * must be valid pointers.
 */
enum NetobsStatus netobs_mc_estimate(const struct NetobsGraph *graph,
                                     enum NetobsTarget target,
                                     enum NetobsLevel level,
                                     uint32_t hops,
                                     size_t n_c,
                                     size_t trials,
                                     uint64_t seed,
                                     double *out_mean,
                                     double *out_stderr);

/**
 * Fitted local node-observability for a density of compromised devices
 * per square kilometer (default fit, clamped to [0, 1]).
 * # Safety
 * `out` must be a valid pointer.
 */
enum NetobsStatus netobs_lno_approx(double compromised_per_km2, double *out);

/**
 * City-scale estimate under the exponential block-density model: a city of
 * `population` people over `area_km2`, fraction `x` of devices compromised.
 * # Safety
 * `out` must be a valid pointer.
 */
enum NetobsStatus netobs_city_exponential(double population,
                                          double area_km2,
                                          double x,
                                          size_t samples,
                                          uint64_t seed,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETOBS_H */
