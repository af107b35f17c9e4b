#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "error.hpp"
#include "locate.hpp"
#include "types.hpp"

namespace wbesprit::bench {

enum class Metric {
  aoa_rad,
  aod_rad,
  delay_ns,
  position_m,
};

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

struct RmseRecord {
  Method method = Method::proposed;
  double bandwidth_hz = 0.0;
  Metric metric = Metric::aoa_rad;
  double value = 0.0;
  int trials_used = 0;
  int failures = 0;
  std::uint64_t seed = 0;
};

// Full per-trial output: energy-ordered path estimates (index 0 is the LOS
// designate) plus the localization solution. The pairing diagnostics are
// filled by the proposed method only.
struct TrialResult {
  bool failed = false;
  Errc failure_code = Errc::ok;
  std::string failure;
  std::vector<locate::PathEstimate> paths;
  std::vector<cplx> gains;
  locate::LocalizationSolution loc;
  int pairing_iterations = 0;
  int pairing_discards = 0;
  bool pairing_converged = true;
};

// Per-subcarrier singular values of the slice matrices (count per row),
// written as CSV by the diagnostics path of the CLI.
std::vector<std::vector<double>> slice_spectra(const ChannelTensor& tensor, int count);
void emit_spectra_csv(const std::vector<std::vector<double>>& rows, const std::string& path);

// Ground truth for one trial (geometry with the per-trial gain phases).
struct TrialTruth {
  std::vector<PathGeometry> paths;
  Position2D p_ue;
  double clock_bias_s = 0.0;
};

TrialTruth make_truth(const BenchConfig& cfg, const SystemConfig& sys_b, std::uint64_t seed,
                      int num_subcarriers, std::uint32_t trial_index);

// One Monte Carlo trial of one method at one bandwidth; deterministic in
// (seed, trial_index) and independent of the method for the channel draw.
TrialResult run_trial(const BenchConfig& cfg, Method method, double bandwidth_hz,
                      std::uint64_t seed, std::uint32_t trial_index);

// Estimation on an existing channel draw (shared across methods in sweeps).
// slice_threads > 1 processes subcarrier slices concurrently; results are
// gathered in subcarrier order either way, so the output is thread-count
// independent.
TrialResult estimate_channel(const ChannelTensor& tensor, const SystemConfig& sys, int num_paths,
                             Method method, const BenchConfig& cfg, std::uint64_t est_seed,
                             unsigned slice_threads = 1);

struct ScoredErrors {
  std::vector<double> aoa_sq;
  std::vector<double> aod_sq;
  std::vector<double> delay_sq_s2;
  double position_sq_m2 = 0.0;
};

// Squared errors after the optimal estimate-to-truth assignment in the
// physical angle plane (exhaustive over permutations, L <= 6).
ScoredErrors match_and_score(const TrialResult& result, const TrialTruth& truth);

struct SweepResult {
  std::vector<RmseRecord> records;
  double threshold_proposed_hz = 0.0;
  double threshold_reference_hz = 0.0;
};

SweepResult sweep_bandwidth(const BenchConfig& cfg, const std::vector<Method>& methods, int trials,
                            std::uint64_t seed, bool verbose = false);

void emit_csv(const std::vector<RmseRecord>& records, const std::string& path);
std::vector<RmseRecord> parse_csv(const std::string& path);

int subcarriers_for_bandwidth(double bandwidth_hz, const SystemConfig& sys);

}  // namespace wbesprit::bench
