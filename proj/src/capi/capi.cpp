#include "wbesprit.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "../core/bench.hpp"
#include "../core/channel.hpp"
#include "../core/config.hpp"
#include "../core/error.hpp"
#include "../core/plot.hpp"
#include "../core/rng.hpp"
#include "../core/scene.hpp"

using namespace wbesprit;

struct wbe_context {
  BenchConfig cfg;
};

struct wbe_result {
  bench::TrialResult trial;
};

namespace {

thread_local std::string g_last_error;

wbe_status status_from(Errc code) {
  switch (code) {
    case Errc::ok: return WBE_OK;
    case Errc::degenerate_geometry: return WBE_ERROR_DEGENERATE_GEOMETRY;
    case Errc::no_intersection: return WBE_ERROR_NO_INTERSECTION;
    case Errc::validation: return WBE_ERROR_INVALID_ARGUMENT;
    case Errc::ill_conditioned: return WBE_ERROR_ILL_CONDITIONED;
    case Errc::underdetermined: return WBE_ERROR_UNDERDETERMINED;
    case Errc::pairing_failure: return WBE_ERROR_PAIRING_FAILURE;
    case Errc::out_of_range: return WBE_ERROR_OUT_OF_RANGE;
    case Errc::io: return WBE_ERROR_IO;
    case Errc::internal: return WBE_ERROR_INTERNAL;
  }
  return WBE_ERROR_INTERNAL;
}

template <typename Fn>
wbe_status guarded(Fn&& fn) {
  try {
    fn();
    return WBE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WBE_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return WBE_ERROR_INTERNAL;
  }
}

wbe_status invalid(const char* msg) {
  g_last_error = msg;
  return WBE_ERROR_INVALID_ARGUMENT;
}

Method to_method(wbe_method m) {
  switch (m) {
    case WBE_METHOD_PROPOSED: return Method::proposed;
    case WBE_METHOD_PROPOSED_NO_PAIRING: return Method::proposed_no_pairing;
    case WBE_METHOD_ESPRIT3D: return Method::esprit3d;
  }
  fail(Errc::validation, "bad method id");
}

double resolved_bandwidth(const BenchConfig& cfg, double bandwidth_hz) {
  if (bandwidth_hz > 0.0) return bandwidth_hz;
  if (!cfg.bandwidths_hz.empty()) return cfg.bandwidths_hz.front();
  return cfg.sys.bandwidth_hz();
}

}  // namespace

extern "C" {

uint32_t wbe_abi_version(void) { return 1; }

const char* wbe_version_string(void) { return "wbesprit 0.1.0"; }

const char* wbe_last_error_message(void) { return g_last_error.c_str(); }

wbe_status wbe_context_create(const char* config_path, wbe_context** out_ctx) {
  if (!out_ctx) return invalid("out_ctx is NULL");
  *out_ctx = nullptr;
  return guarded([&] {
    auto ctx = std::make_unique<wbe_context>();
    ctx->cfg = (config_path && *config_path) ? load_config_file(config_path) : default_config();
    *out_ctx = ctx.release();
  });
}

wbe_status wbe_context_create_from_json(const char* json_text, wbe_context** out_ctx) {
  if (!out_ctx) return invalid("out_ctx is NULL");
  if (!json_text) return invalid("json_text is NULL");
  *out_ctx = nullptr;
  return guarded([&] {
    auto ctx = std::make_unique<wbe_context>();
    ctx->cfg = load_config_text(json_text);
    *out_ctx = ctx.release();
  });
}

void wbe_context_destroy(wbe_context* ctx) { delete ctx; }

wbe_status wbe_context_set_noiseless(wbe_context* ctx, int noiseless) {
  if (!ctx) return invalid("ctx is NULL");
  if (noiseless) {
    ctx->cfg.sys.noise_variance_override = 0.0;
  } else {
    ctx->cfg.sys.noise_variance_override.reset();
  }
  return WBE_OK;
}

wbe_status wbe_context_bandwidth_count(const wbe_context* ctx, int* out_count) {
  if (!ctx || !out_count) return invalid("NULL argument");
  *out_count = static_cast<int>(ctx->cfg.bandwidths_hz.size());
  return WBE_OK;
}

wbe_status wbe_context_bandwidth(const wbe_context* ctx, int index, double* out_hz) {
  if (!ctx || !out_hz) return invalid("NULL argument");
  const auto& b = ctx->cfg.bandwidths_hz;
  if (index < 0) index = 0;
  if (b.empty() || index >= static_cast<int>(b.size())) return invalid("bandwidth index out of range");
  *out_hz = b[static_cast<std::size_t>(index)];
  return WBE_OK;
}

wbe_status wbe_thresholds(const wbe_context* ctx, double* out_proposed_hz,
                          double* out_reference_hz) {
  if (!ctx || !out_proposed_hz || !out_reference_hz) return invalid("NULL argument");
  return guarded([&] {
    const auto t = channel::narrowband_thresholds(ctx->cfg.sys, ctx->cfg.strictness);
    *out_proposed_hz = t.proposed_hz;
    *out_reference_hz = t.reference_hz;
  });
}

wbe_status wbe_simulate(const wbe_context* ctx, double bandwidth_hz, uint64_t seed,
                        uint32_t trial_index, const char* out_path) {
  if (!ctx || !out_path) return invalid("NULL argument");
  return guarded([&] {
    SystemConfig sys = ctx->cfg.sys;
    const double b = resolved_bandwidth(ctx->cfg, bandwidth_hz);
    sys.num_subcarriers = bench::subcarriers_for_bandwidth(b, sys);
    const auto truth = bench::make_truth(ctx->cfg, sys, seed, sys.num_subcarriers, trial_index);
    ChannelTensor t = channel::synthesize(truth.paths, sys);
    const double variance = channel::noise_variance(sys);
    if (variance > 0.0) {
      t = channel::add_noise(t, variance,
                             mix_seed(seed, static_cast<std::uint64_t>(sys.num_subcarriers),
                                      trial_index, 2));
    }
    channel::dump_tensor(t, out_path);
  });
}

wbe_status wbe_estimate(const wbe_context* ctx, wbe_method method, double bandwidth_hz,
                        uint64_t seed, uint32_t trial_index, wbe_result** out_result) {
  if (!ctx || !out_result) return invalid("NULL argument");
  *out_result = nullptr;
  return guarded([&] {
    const double b = resolved_bandwidth(ctx->cfg, bandwidth_hz);
    auto res = std::make_unique<wbe_result>();
    res->trial = bench::run_trial(ctx->cfg, to_method(method), b, seed, trial_index);
    if (res->trial.failed) {
      fail(res->trial.failure_code == Errc::ok ? Errc::internal : res->trial.failure_code,
           "trial failed: " + res->trial.failure);
    }
    *out_result = res.release();
  });
}

wbe_status wbe_ground_truth(const wbe_context* ctx, double bandwidth_hz, uint64_t seed,
                            uint32_t trial_index, wbe_result** out_result) {
  if (!ctx || !out_result) return invalid("NULL argument");
  *out_result = nullptr;
  return guarded([&] {
    SystemConfig sys = ctx->cfg.sys;
    const double b = resolved_bandwidth(ctx->cfg, bandwidth_hz);
    sys.num_subcarriers = bench::subcarriers_for_bandwidth(b, sys);
    const auto truth = bench::make_truth(ctx->cfg, sys, seed, sys.num_subcarriers, trial_index);
    auto res = std::make_unique<wbe_result>();
    for (const auto& p : truth.paths) {
      res->trial.paths.push_back({p.theta_tx, p.theta_rx, p.tau_s});
      res->trial.gains.push_back(p.gain);
    }
    res->trial.loc.p_ue = truth.p_ue;
    res->trial.loc.clock_bias_s = truth.clock_bias_s;
    res->trial.loc.residual_norm = 0.0;
    *out_result = res.release();
  });
}

wbe_status wbe_result_path_count(const wbe_result* result, int* out_count) {
  if (!result || !out_count) return invalid("NULL argument");
  *out_count = static_cast<int>(result->trial.paths.size());
  return WBE_OK;
}

wbe_status wbe_result_path(const wbe_result* result, int index, wbe_path* out_path) {
  if (!result || !out_path) return invalid("NULL argument");
  if (index < 0 || index >= static_cast<int>(result->trial.paths.size())) {
    return invalid("path index out of range");
  }
  const auto& p = result->trial.paths[static_cast<std::size_t>(index)];
  out_path->theta_tx_rad = p.theta_tx;
  out_path->theta_rx_rad = p.theta_rx;
  out_path->tau_s = p.tau_s;
  const cplx g = result->trial.gains[static_cast<std::size_t>(index)];
  out_path->gain_re = g.real();
  out_path->gain_im = g.imag();
  return WBE_OK;
}

wbe_status wbe_result_position(const wbe_result* result, double* out_x_m, double* out_y_m,
                               double* out_clock_bias_s, double* out_residual) {
  if (!result) return invalid("result is NULL");
  if (out_x_m) *out_x_m = result->trial.loc.p_ue.x;
  if (out_y_m) *out_y_m = result->trial.loc.p_ue.y;
  if (out_clock_bias_s) *out_clock_bias_s = result->trial.loc.clock_bias_s;
  if (out_residual) *out_residual = result->trial.loc.residual_norm;
  return WBE_OK;
}

wbe_status wbe_result_pairing_stats(const wbe_result* result, int* out_iterations,
                                    int* out_discards, int* out_converged) {
  if (!result) return invalid("result is NULL");
  if (out_iterations) *out_iterations = result->trial.pairing_iterations;
  if (out_discards) *out_discards = result->trial.pairing_discards;
  if (out_converged) *out_converged = result->trial.pairing_converged ? 1 : 0;
  return WBE_OK;
}

void wbe_result_destroy(wbe_result* result) { delete result; }

wbe_status wbe_dump_spectrum(const wbe_context* ctx, double bandwidth_hz, uint64_t seed,
                             uint32_t trial_index, int count, const char* out_csv_path) {
  if (!ctx || !out_csv_path) return invalid("NULL argument");
  return guarded([&] {
    SystemConfig sys = ctx->cfg.sys;
    const double b = resolved_bandwidth(ctx->cfg, bandwidth_hz);
    sys.num_subcarriers = bench::subcarriers_for_bandwidth(b, sys);
    const auto truth = bench::make_truth(ctx->cfg, sys, seed, sys.num_subcarriers, trial_index);
    ChannelTensor t = channel::synthesize(truth.paths, sys);
    const double variance = channel::noise_variance(sys);
    if (variance > 0.0) {
      t = channel::add_noise(t, variance,
                             mix_seed(seed, static_cast<std::uint64_t>(sys.num_subcarriers),
                                      trial_index, 2));
    }
    bench::emit_spectra_csv(bench::slice_spectra(t, count > 0 ? count : 6), out_csv_path);
  });
}

wbe_status wbe_sweep_csv(const wbe_context* ctx, const char* methods_csv, uint32_t trials,
                         uint64_t seed, const char* out_csv_path, int verbose) {
  if (!ctx || !out_csv_path) return invalid("NULL argument");
  return guarded([&] {
    const std::vector<Method> methods =
        methods_csv && *methods_csv
            ? parse_method_list(methods_csv)
            : std::vector<Method>{Method::proposed, Method::proposed_no_pairing, Method::esprit3d};
    const int n = trials > 0 ? static_cast<int>(trials) : ctx->cfg.trials;
    const auto sweep = bench::sweep_bandwidth(ctx->cfg, methods, n, seed, verbose != 0);
    bench::emit_csv(sweep.records, out_csv_path);
  });
}

wbe_status wbe_plot(const wbe_context* ctx, const char* csv_path, const char* svg_path) {
  if (!ctx || !csv_path || !svg_path) return invalid("NULL argument");
  return guarded([&] {
    const auto t = channel::narrowband_thresholds(ctx->cfg.sys, ctx->cfg.strictness);
    plot::emit_plot(csv_path, svg_path, t.proposed_hz, t.reference_hz);
  });
}

}  // extern "C"
