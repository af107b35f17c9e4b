// Command-line front end over the wbesprit C API.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "wbesprit.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  bool verbose = false;
};

int die(const char* what, wbe_status rc) {
  std::fprintf(stderr, "error: %s: %s (code %d)\n", what, wbe_last_error_message(),
               static_cast<int>(rc));
  return 1;
}

struct ContextGuard {
  wbe_context* ctx = nullptr;
  ~ContextGuard() { wbe_context_destroy(ctx); }
};

int open_context(const CommonOpts& opts, ContextGuard& guard) {
  const wbe_status rc = wbe_context_create(
      opts.config_path.empty() ? nullptr : opts.config_path.c_str(), &guard.ctx);
  if (rc != WBE_OK) return die("loading config", rc);
  return 0;
}

wbe_method method_from_string(const std::string& s) {
  if (s == "proposed_no_pairing" || s == "no_pairing") return WBE_METHOD_PROPOSED_NO_PAIRING;
  if (s == "esprit3d" || s == "3d") return WBE_METHOD_ESPRIT3D;
  return WBE_METHOD_PROPOSED;
}

void print_result(const char* label, wbe_result* res) {
  int n = 0;
  wbe_result_path_count(res, &n);
  std::printf("%s paths (theta_tx_deg, theta_rx_deg, tau_ns, |gain|):\n", label);
  for (int i = 0; i < n; ++i) {
    wbe_path p{};
    wbe_result_path(res, i, &p);
    const double mag = std::sqrt(p.gain_re * p.gain_re + p.gain_im * p.gain_im);
    std::printf("  [%d]  %12.7f  %12.7f  %14.6f  %.4e\n", i, p.theta_tx_rad * 180.0 / 3.14159265358979323846,
                p.theta_rx_rad * 180.0 / 3.14159265358979323846, p.tau_s * 1e9, mag);
  }
  double x = 0, y = 0, bias = 0, resid = 0;
  wbe_result_position(res, &x, &y, &bias, &resid);
  std::printf("%s position: (%.6f, %.6f) m, clock bias %.6e s, residual %.3e\n", label, x, y,
              bias, resid);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wideband mmWave channel estimation and localization benchmark"};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "JSON config file (defaults built in)");
  app.add_option("--seed", opts.seed, "random seed");
  app.add_flag("--verbose", opts.verbose, "verbose progress output");

  // thresholds
  auto* cmd_thresholds =
      app.add_subcommand("thresholds", "print both narrowband threshold bandwidths");

  // simulate
  auto* cmd_simulate = app.add_subcommand("simulate", "dump one channel tensor draw");
  double sim_bandwidth = 0.0;
  std::uint32_t sim_trial = 0;
  bool sim_noiseless = false;
  std::string sim_out = "tensor.wbct";
  cmd_simulate->add_option("--bandwidth-hz", sim_bandwidth, "bandwidth (default: first of grid)");
  cmd_simulate->add_option("--trial", sim_trial, "trial index");
  cmd_simulate->add_flag("--noiseless", sim_noiseless, "disable estimation noise");
  cmd_simulate->add_option("--out", sim_out, "output file")->required();

  // estimate
  auto* cmd_estimate = app.add_subcommand("estimate", "run one trial and print the parameters");
  std::string est_method = "proposed";
  double est_bandwidth = 0.0;
  std::uint32_t est_trial = 0;
  bool est_noiseless = false;
  std::string est_spectrum = "spectrum.csv";
  cmd_estimate->add_option("--method", est_method, "proposed|proposed_no_pairing|esprit3d");
  cmd_estimate->add_option("--bandwidth-hz", est_bandwidth, "bandwidth (default: first of grid)");
  cmd_estimate->add_option("--trial", est_trial, "trial index");
  cmd_estimate->add_flag("--noiseless", est_noiseless, "disable estimation noise");
  cmd_estimate->add_option("--spectrum-out", est_spectrum,
                           "singular-value spectrum CSV (written with --verbose)");

  // sweep
  auto* cmd_sweep = app.add_subcommand("sweep", "full Monte Carlo bandwidth sweep -> CSV");
  std::string sweep_methods;
  std::uint32_t sweep_trials = 0;
  std::string sweep_out = ".";
  cmd_sweep->add_option("--methods", sweep_methods, "comma-separated method list (default: all)");
  cmd_sweep->add_option("--trials", sweep_trials, "Monte Carlo trials per point");
  cmd_sweep->add_option("--out", sweep_out, "output directory");

  // plot
  auto* cmd_plot = app.add_subcommand("plot", "render a sweep CSV as SVG");
  std::string plot_in;
  std::string plot_out;
  cmd_plot->add_option("--in", plot_in, "input CSV")->required();
  cmd_plot->add_option("--out", plot_out, "output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  ContextGuard guard;
  if (int rc = open_context(opts, guard)) return rc;
  wbe_context* ctx = guard.ctx;

  if (cmd_thresholds->parsed()) {
    double proposed = 0.0, reference = 0.0;
    const wbe_status rc = wbe_thresholds(ctx, &proposed, &reference);
    if (rc != WBE_OK) return die("thresholds", rc);
    std::printf("proposed_hz=%.6f\n", proposed);
    std::printf("reference_hz=%.6f\n", reference);
    std::printf("narrowband thresholds: %.2f MHz (revised condition), %.2f MHz (reference)\n",
                proposed / 1e6, reference / 1e6);
    return 0;
  }

  if (cmd_simulate->parsed()) {
    if (sim_noiseless) wbe_context_set_noiseless(ctx, 1);
    const wbe_status rc = wbe_simulate(ctx, sim_bandwidth, opts.seed, sim_trial, sim_out.c_str());
    if (rc != WBE_OK) return die("simulate", rc);
    std::printf("wrote %s\n", sim_out.c_str());
    return 0;
  }

  if (cmd_estimate->parsed()) {
    if (est_noiseless) wbe_context_set_noiseless(ctx, 1);
    wbe_result* truth = nullptr;
    wbe_status rc = wbe_ground_truth(ctx, est_bandwidth, opts.seed, est_trial, &truth);
    if (rc != WBE_OK) return die("ground truth", rc);
    print_result("truth", truth);
    wbe_result_destroy(truth);

    wbe_result* res = nullptr;
    rc = wbe_estimate(ctx, method_from_string(est_method), est_bandwidth, opts.seed, est_trial,
                      &res);
    if (rc != WBE_OK) return die("estimate", rc);
    std::printf("method: %s\n", est_method.c_str());
    print_result("estimate", res);
    if (opts.verbose) {
      int iters = 0, discards = 0, converged = 0;
      wbe_result_pairing_stats(res, &iters, &discards, &converged);
      std::printf("pairing: %d iterations, %d discarded measurements, converged=%d\n", iters,
                  discards, converged);
      rc = wbe_dump_spectrum(ctx, est_bandwidth, opts.seed, est_trial, 6, est_spectrum.c_str());
      if (rc != WBE_OK) return die("spectrum dump", rc);
      std::printf("wrote %s\n", est_spectrum.c_str());
    }
    wbe_result_destroy(res);
    return 0;
  }

  if (cmd_sweep->parsed()) {
    std::error_code ec;
    std::filesystem::create_directories(sweep_out, ec);
    const std::string csv = sweep_out + "/sweep.csv";
    const wbe_status rc =
        wbe_sweep_csv(ctx, sweep_methods.empty() ? nullptr : sweep_methods.c_str(), sweep_trials,
                      opts.seed, csv.c_str(), opts.verbose ? 1 : 0);
    if (rc != WBE_OK) return die("sweep", rc);
    std::printf("wrote %s\n", csv.c_str());
    return 0;
  }

  if (cmd_plot->parsed()) {
    const wbe_status rc = wbe_plot(ctx, plot_in.c_str(), plot_out.c_str());
    if (rc != WBE_OK) return die("plot", rc);
    std::printf("wrote %s\n", plot_out.c_str());
    return 0;
  }

  return 0;
}
