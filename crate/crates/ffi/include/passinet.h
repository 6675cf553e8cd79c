#ifndef PASSINET_H
#define PASSINET_H

/* Generated with cbindgen:0.26.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the library's error taxonomy.
 */
typedef enum PnStatus {
  PN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PN_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PN_STATUS_INVALID_UTF8 = 2,
  /**
   * The JSON document could not be parsed.
   */
  PN_STATUS_PARSE_ERROR = 3,
  /**
   * Arguments violate a documented precondition.
   */
  PN_STATUS_INVALID_INPUT = 4,
  /**
   * The agent is not hyper-minimum-phase (assumption A1).
   */
  PN_STATUS_PASSIFIABILITY_VIOLATED = 5,
  /**
   * The digraph has no directed spanning tree (assumption A2).
   */
  PN_STATUS_TOPOLOGY_VIOLATED = 6,
  /**
   * An iterative numerical routine failed.
   */
  PN_STATUS_NUMERICAL_FAILURE = 7,
  /**
   * The simulation hit the state overflow guard.
   */
  PN_STATUS_DIVERGED = 8,
  /**
   * The callee panicked; treat the handle as poisoned.
   */
  PN_STATUS_INTERNAL_PANIC = 9,
} PnStatus;

/**
 * Opaque network handle: parsed network file plus validated agent/graph.
 */
typedef struct PnNetwork PnNetwork;

/**
 * Flat analysis summary. `sufficient_gain` is NaN when either assumption
 * fails; `spectral_gap` is NaN when the spectrum has no nonzero eigenvalue.
 */
typedef struct PnAnalysis {
  /**
   * Assumption A1: the agent is hyper-minimum-phase (0/1).
   */
  int32_t is_hmp;
  /**
   * Assumption A2: the digraph has a directed spanning tree (0/1).
   */
  int32_t has_spanning_tree;
  /**
   * Multiplicity of the zero Laplace eigenvalue.
   */
  size_t zero_multiplicity;
  /**
   * Passification constant kappa_0 (NaN when A1 fails).
   */
  double kappa0;
  /**
   * kappa_0 was clamped to zero: the agent is already strictly passive (0/1).
   */
  int32_t already_passive;
  /**
   * r(L): minimum real part over nonzero Laplace eigenvalues.
   */
  double spectral_gap;
  /**
   * Sufficient identical gain threshold kappa_0 / r(L).
   */
  double sufficient_gain;
} PnAnalysis;

/**
 * Flat simulation summary. `final_error_to_c` is NaN when the consensus
 * vector is unavailable.
 */
typedef struct PnSimSummary {
  /**
   * Terminal disagreement fell below the tolerance (0/1).
   */
  int32_t converged;
  /**
   * e(t_end).
   */
  double final_disagreement;
  /**
   * max_i ||x_i(t_end) - c(t_end)||_2.
   */
  double final_error_to_c;
} PnSimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pn_version(void);

/**
 * Copy the last error message for this thread into `buf` (truncated to
 * `len - 1` bytes, always NUL-terminated when `len > 0`). Returns the full
 * message length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (query mode).
 */
size_t pn_last_error(char *buf, size_t len);

/**
 * Parse a JSON network document (see the README for the schema) into an
 * opaque handle. On success `*out` owns the network; release it with
 * [`pn_network_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum PnStatus pn_network_from_json(const char *json, struct PnNetwork **out);

/**
 * Release a handle created by [`pn_network_from_json`]. Null is ignored.
 *
 * # Safety
 * `net` must be null or a pointer previously returned by this library and
 * not yet freed.
 */
void pn_network_free(struct PnNetwork *net);

/**
 * Number of agents (vertices) in the network.
 *
 * # Safety
 * `net` must be a live handle; `out` must be a valid pointer.
 */
enum PnStatus pn_network_agent_count(const struct PnNetwork *net, size_t *out);

/**
 * Passifiability and spectral analysis of the network.
 *
 * # Safety
 * `net` must be a live handle; `out` must be a valid pointer.
 */
enum PnStatus pn_analyze(const struct PnNetwork *net, struct PnAnalysis *out);

/**
 * Exact identical-gain threshold located by bisection of the spectral test
 * inside [k_lo, k_hi].
 *
 * # Safety
 * `net` must be a live handle; `out` must be a valid pointer.
 */
enum PnStatus pn_exact_threshold(const struct PnNetwork *net,
                                 double k_lo,
                                 double k_hi,
                                 double *out);

/**
 * Exact gain threshold for a directed cycle of N double integrators:
 * 0.5 * cot^2(pi / N).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PnStatus pn_cycle_threshold(size_t n, double *out);

/**
 * Exact double-integrator threshold max sin^2(arg lambda) / Re lambda over
 * a spectrum given as parallel re/im arrays of length `len`.
 *
 * # Safety
 * `re` and `im` must point to `len` readable doubles; `out` must be valid.
 */
enum PnStatus pn_general_threshold(const double *re, const double *im, size_t len, double *out);

/**
 * Integrate the closed loop. Non-positive `t_end` / `dt` fall back to the
 * file's values (or the defaults 25 s / 1e-3 s); `seed` feeds the initial
 * state draw when the file has no x0 block. Requires a gains block.
 *
 * # Safety
 * `net` must be a live handle; `out` must be a valid pointer.
 */
enum PnStatus pn_simulate(const struct PnNetwork *net,
                          double t_end,
                          double dt,
                          uint64_t seed,
                          struct PnSimSummary *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PASSINET_H */
