/* wbesprit - wideband mmWave MIMO-OFDM channel parameter estimation and
 * localization: per-subcarrier 2D ESPRIT with constrained K-means pairing
 * across subcarriers, least-squares delay recovery, geometric localization,
 * and a Monte Carlo benchmark against a standard 3D ESPRIT baseline.
 *
 * C API over an opaque context. All functions return WBE_OK (0) on success
 * or a negative error code; wbe_last_error_message() describes the most
 * recent failure on the calling thread.
 */

#ifndef WBESPRIT_H
#define WBESPRIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WBE_API __declspec(dllexport)
#else
#define WBE_API __attribute__((visibility("default")))
#endif

typedef enum {
  WBE_OK = 0,
  WBE_ERROR_INVALID_ARGUMENT = -1,
  WBE_ERROR_DEGENERATE_GEOMETRY = -2,
  WBE_ERROR_NO_INTERSECTION = -3,
  WBE_ERROR_ILL_CONDITIONED = -4,
  WBE_ERROR_UNDERDETERMINED = -5,
  WBE_ERROR_PAIRING_FAILURE = -6,
  WBE_ERROR_OUT_OF_RANGE = -7,
  WBE_ERROR_IO = -8,
  WBE_ERROR_INTERNAL = -99
} wbe_status;

typedef enum {
  WBE_METHOD_PROPOSED = 0,
  WBE_METHOD_PROPOSED_NO_PAIRING = 1,
  WBE_METHOD_ESPRIT3D = 2
} wbe_method;

/* Opaque handle holding a parsed configuration (system, scene, sweep grid). */
typedef struct wbe_context wbe_context;

/* Opaque handle holding the output of one estimation trial. */
typedef struct wbe_result wbe_result;

typedef struct {
  double theta_tx_rad;
  double theta_rx_rad;
  double tau_s;
  double gain_re;
  double gain_im;
} wbe_path;

WBE_API uint32_t wbe_abi_version(void);
WBE_API const char* wbe_version_string(void);

/* Message describing the last error raised on this thread. */
WBE_API const char* wbe_last_error_message(void);

/* Context lifecycle. A NULL or empty path loads the built-in defaults. */
WBE_API wbe_status wbe_context_create(const char* config_path, wbe_context** out_ctx);
WBE_API wbe_status wbe_context_create_from_json(const char* json_text, wbe_context** out_ctx);
WBE_API void wbe_context_destroy(wbe_context* ctx);

/* Disables estimation noise (sets the noise variance override to zero). */
WBE_API wbe_status wbe_context_set_noiseless(wbe_context* ctx, int noiseless);

/* Number of sweep bandwidths configured; index -1 below means "first". */
WBE_API wbe_status wbe_context_bandwidth_count(const wbe_context* ctx, int* out_count);
WBE_API wbe_status wbe_context_bandwidth(const wbe_context* ctx, int index, double* out_hz);

/* Both narrowband threshold bandwidths in Hz. */
WBE_API wbe_status wbe_thresholds(const wbe_context* ctx, double* out_proposed_hz,
                                  double* out_reference_hz);

/* Synthesizes one channel draw, optionally noisy, and writes the binary
 * tensor dump (header "WBCT", u32 M_tx, u32 M_rx, u32 K, then little-endian
 * float32 re/im pairs in subcarrier-major, tx-row-major order). */
WBE_API wbe_status wbe_simulate(const wbe_context* ctx, double bandwidth_hz, uint64_t seed,
                                uint32_t trial_index, const char* out_path);

/* Runs one estimation trial. */
WBE_API wbe_status wbe_estimate(const wbe_context* ctx, wbe_method method, double bandwidth_hz,
                                uint64_t seed, uint32_t trial_index, wbe_result** out_result);

/* Ground truth for the same (seed, trial) channel draw. */
WBE_API wbe_status wbe_ground_truth(const wbe_context* ctx, double bandwidth_hz, uint64_t seed,
                                    uint32_t trial_index, wbe_result** out_result);

WBE_API wbe_status wbe_result_path_count(const wbe_result* result, int* out_count);
WBE_API wbe_status wbe_result_path(const wbe_result* result, int index, wbe_path* out_path);
WBE_API wbe_status wbe_result_position(const wbe_result* result, double* out_x_m, double* out_y_m,
                                       double* out_clock_bias_s, double* out_residual);
/* Pairing diagnostics of a proposed-method trial (zeros for other methods). */
WBE_API wbe_status wbe_result_pairing_stats(const wbe_result* result, int* out_iterations,
                                            int* out_discards, int* out_converged);
WBE_API void wbe_result_destroy(wbe_result* result);

/* Diagnostic dump: per-subcarrier singular values of the noisy channel
 * slices for one trial draw, as CSV (subcarrier, sigma1..sigmaN). */
WBE_API wbe_status wbe_dump_spectrum(const wbe_context* ctx, double bandwidth_hz, uint64_t seed,
                                     uint32_t trial_index, int count, const char* out_csv_path);

/* Full Monte Carlo sweep over the configured bandwidth grid; methods_csv is a
 * comma-separated subset of proposed,proposed_no_pairing,esprit3d (NULL = all
 * three). Writes the RMSE records as CSV. */
WBE_API wbe_status wbe_sweep_csv(const wbe_context* ctx, const char* methods_csv, uint32_t trials,
                                 uint64_t seed, const char* out_csv_path, int verbose);

/* Renders a sweep CSV as a log-log SVG with the threshold verticals. */
WBE_API wbe_status wbe_plot(const wbe_context* ctx, const char* csv_path, const char* svg_path);

#ifdef __cplusplus
}
#endif

#endif /* WBESPRIT_H */
