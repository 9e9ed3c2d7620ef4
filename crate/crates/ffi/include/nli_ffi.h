#ifndef NLI_FFI_H
#define NLI_FFI_H

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Correction mode for [`nli_estimate`].
typedef enum NliMode {
  // Whatever the scenario's `options` entry says (EGN if absent).
  NLI_MODE_FROM_SCENARIO = 0,
  NLI_MODE_GN = 1,
  NLI_MODE_EGN = 2,
} NliMode;

// Result code of every fallible call.
typedef enum NliStatus {
  NLI_STATUS_OK = 0,
  NLI_STATUS_NULL_POINTER = 1,
  NLI_STATUS_INVALID_UTF8 = 2,
  NLI_STATUS_INVALID_INPUT = 3,
  NLI_STATUS_SCHEMA = 4,
  NLI_STATUS_VALIDATION = 5,
  NLI_STATUS_ZERO_DISPERSION = 6,
  NLI_STATUS_CORRECTION_DOMAIN = 7,
  NLI_STATUS_CONVERGENCE = 8,
  NLI_STATUS_GENERATION = 9,
  NLI_STATUS_GAIN_BELOW_UNITY = 10,
  NLI_STATUS_OUT_OF_RANGE = 11,
  NLI_STATUS_PANIC = 12,
} NliStatus;

// Per-channel results of one estimate.
typedef struct NliReport NliReport;

// Parsed, validated link scenario.
typedef struct NliScenario NliScenario;

// One channel of an [`NliReport`]. Powers in W, frequency in Hz.
typedef struct NliChannelResult {
  size_t channel_index;
  double center_frequency;
  double launch_power;
  double ase_power;
  double nli_power;
  // NLI PSD at the channel center, W/Hz.
  double nli_psd;
  double osnr_nl_db;
  // Nonzero when a low-dispersion warning applies.
  uint8_t low_dispersion;
} NliChannelResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread; do not free.
const char *nli_last_error_message(void);

// Parses and validates a scenario JSON document.
enum NliStatus nli_scenario_from_json(const char *json, struct NliScenario **out);

// Releases a scenario; null is ignored.
void nli_scenario_free(struct NliScenario *scenario);

// Number of spans, or 0 for null.
size_t nli_scenario_span_count(const struct NliScenario *scenario);

// Per-channel OSNR_NL of every channel active in all spans.
//
// `coherence`: negative keeps the scenario's setting, 0 disables the
// span-to-span coherence term, positive enables it.
enum NliStatus nli_estimate(const struct NliScenario *scenario,
                            enum NliMode mode,
                            int32_t coherence,
                            struct NliReport **out);

// Number of channel records, or 0 for null.
size_t nli_report_len(const struct NliReport *report);

// Copies record `i` (in report order, not channel index) into `out`.
enum NliStatus nli_report_get(const struct NliReport *report,
                              size_t i,
                              struct NliChannelResult *out);

// Releases a report; null is ignored.
void nli_report_free(struct NliReport *report);

// Φ of a modulation format given by name, e.g. `"PM-16QAM"`.
enum NliStatus nli_phi_constant(const char *format, double *out);

// Scenario `index` of the test set described by `config_json` (null for the
// default config), as a JSON document to release with [`nli_string_free`].
enum NliStatus nli_generate_scenario_json(const char *config_json, size_t index, char **out);

// Releases a string returned by this library; null is ignored.
void nli_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLI_FFI_H */
