#ifndef HOPCAP_H
#define HOPCAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HopcapFlow {
  HOPCAP_FLOW_FORWARD = 0,
  HOPCAP_FLOW_REVERSE = 1,
} HopcapFlow;

typedef enum HopcapMode {
  HOPCAP_MODE_TRADITIONAL = 0,
  HOPCAP_MODE_NETWORK_CODED = 1,
} HopcapMode;

typedef enum HopcapStatus {
  HOPCAP_STATUS_OK = 0,
  HOPCAP_STATUS_NULL_POINTER = 1,
  HOPCAP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The analytical and packet engines disagree.
   */
  HOPCAP_STATUS_CONSISTENCY = 3,
  HOPCAP_STATUS_BUFFER_TOO_SMALL = 4,
  HOPCAP_STATUS_INTERNAL = 5,
} HopcapStatus;

/**
 * Experiment parameters plus the single configuration that
 * `hopcap_scenario_capacity` evaluates.
 */
typedef struct HopcapScenario HopcapScenario;

typedef struct HopcapTrace HopcapTrace;

/**
 * Bottleneck rates and capacity of one stream, in bits per second.
 */
typedef struct HopcapCapacity {
  double forward_bottleneck_bps;
  double reverse_bottleneck_bps;
  double capacity_bps;
} HopcapCapacity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (empty after a
 * successful call).
 *
 * # Safety
 * `buf` must be valid for `cap` bytes or null; `out_len` must be valid.
 */
enum HopcapStatus hopcap_last_error_message(char *buf, size_t cap, size_t *out_len);

/**
 * Creates a scenario with the default parameters: NC, Z = 4, 4 hops,
 * one stream.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum HopcapStatus hopcap_scenario_new(struct HopcapScenario **out);

/**
 * Sets one parameter. Besides the experiment config keys this accepts
 * `mode`, `z`, `hops` and `num_streams` for the single configuration.
 *
 * # Safety
 * `scenario` must come from `hopcap_scenario_new`; `key` and `value`
 * must be NUL-terminated strings.
 */
enum HopcapStatus hopcap_scenario_set(struct HopcapScenario *scenario,
                                      const char *key,
                                      const char *value);

/**
 * Evaluates the single configuration and reports stream `stream`
 * (0-based).
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum HopcapStatus hopcap_scenario_capacity(const struct HopcapScenario *scenario,
                                           size_t stream,
                                           struct HopcapCapacity *out);

/**
 * Best period among `z_values` for stream 1, ties to the smaller period.
 *
 * # Safety
 * `z_values` must point to `count` values; outputs must be valid.
 */
enum HopcapStatus hopcap_scenario_optimum_z(const struct HopcapScenario *scenario,
                                            const size_t *z_values,
                                            size_t count,
                                            size_t *out_z,
                                            double *out_capacity_bps);

/**
 * Runs the configured sweep and copies its CSV.
 *
 * # Safety
 * `scenario` must be a live handle; see the module notes on buffers.
 */
enum HopcapStatus hopcap_scenario_sweep_csv(const struct HopcapScenario *scenario,
                                            char *buf,
                                            size_t cap,
                                            size_t *out_len);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void hopcap_scenario_free(struct HopcapScenario *scenario);

/**
 * Packet-level simulation of one route of `nodes` nodes for `periods`
 * schedule cycles.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum HopcapStatus hopcap_simulate(enum HopcapMode mode,
                                  size_t nodes,
                                  size_t z,
                                  size_t periods,
                                  struct HopcapTrace **out);

/**
 * # Safety
 * `trace` must be a live handle; `out` must be valid for writes.
 */
enum HopcapStatus hopcap_trace_slot_count(const struct HopcapTrace *trace, size_t *out);

/**
 * Steady-state latency in timeslots, counting both the injection and the
 * delivery slot.
 *
 * # Safety
 * `trace` must be a live handle; `out` must be valid for writes.
 */
enum HopcapStatus hopcap_trace_latency(const struct HopcapTrace *trace,
                                       enum HopcapFlow flow,
                                       uint64_t *out);

/**
 * Steady-state deliveries per timeslot as a reduced fraction.
 *
 * # Safety
 * `trace` must be a live handle; outputs must be valid for writes.
 */
enum HopcapStatus hopcap_trace_delivery_rate(const struct HopcapTrace *trace,
                                             uint64_t *out_numer,
                                             uint64_t *out_denom);

/**
 * Copies the slot-by-slot text table.
 *
 * # Safety
 * `trace` must be a live handle; see the module notes on buffers.
 */
enum HopcapStatus hopcap_trace_render(const struct HopcapTrace *trace,
                                      char *buf,
                                      size_t cap,
                                      size_t *out_len);

/**
 * # Safety
 * `trace` must be null or a handle not yet freed.
 */
void hopcap_trace_free(struct HopcapTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOPCAP_H */
