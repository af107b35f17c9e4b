#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "delay_gain.hpp"
#include "error.hpp"
#include "esprit.hpp"
#include "pairing.hpp"
#include "rng.hpp"
#include "scene.hpp"

namespace wbesprit::bench {

namespace {

constexpr std::uint64_t kPhaseTag = 1;
constexpr std::uint64_t kNoiseTag = 2;
constexpr std::uint64_t kEstimateTag = 3;

SystemConfig sys_at_bandwidth(const SystemConfig& sys, double bandwidth_hz) {
  SystemConfig s = sys;
  s.num_subcarriers = subcarriers_for_bandwidth(bandwidth_hz, sys);
  return s;
}

// Runs fn(k) for k in [0, count), possibly on several threads; results must
// be written into per-k slots so the gathering order is the subcarrier order.
template <typename Fn>
void for_each_subcarrier(int count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 32) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= count) break;
      fn(k);
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
  pool.reserve(n - 1);
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

struct PathTrack {
  double phi_tx = 0.0;
  double phi_rx = 0.0;
  delaygain::GainTrack track;
};

TrialResult finish_trial(std::vector<PathTrack>& paths, const SystemConfig& sys,
                         const Position2D& p_bs) {
  TrialResult res;
  struct Scored {
    locate::PathEstimate est;
    cplx gain;
    double energy;
  };
  std::vector<Scored> scored;
  scored.reserve(paths.size());
  for (auto& p : paths) {
    const auto dg = delaygain::estimate_delay_gain(p.track, sys);
    Scored s;
    s.est.theta_tx = esprit::normalized_to_physical(p.phi_tx, sys);
    s.est.theta_rx = esprit::normalized_to_physical(p.phi_rx, sys);
    s.est.tau_s = dg.tau_s;
    s.gain = dg.gain;
    double e = 0.0;
    for (const auto& g : p.track.gains) e += std::abs(g);
    s.energy = e / static_cast<double>(p.track.gains.size());
    scored.push_back(s);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.energy > b.energy; });
  for (const auto& s : scored) {
    res.paths.push_back(s.est);
    res.gains.push_back(s.gain);
  }
  if (res.paths.size() >= 2) {
    res.loc = locate::locate_ue(res.paths, p_bs);
  }
  return res;
}

TrialResult estimate_proposed(const ChannelTensor& tensor, const SystemConfig& sys, int num_paths,
                              const BenchConfig& cfg, std::uint64_t est_seed,
                              unsigned slice_threads) {
  const int K = tensor.num_subcarriers();
  std::vector<pairing::AngleMeasurement> ms(static_cast<std::size_t>(K) * num_paths);
  for_each_subcarrier(K, slice_threads, [&](int k) {
    const auto modes = esprit::esprit_2d(tensor.slice(k), num_paths, mix_seed(est_seed, k, 0x2d));
    for (int slot = 0; slot < num_paths; ++slot) {
      pairing::AngleMeasurement& m = ms[static_cast<std::size_t>(k) * num_paths + slot];
      m.y(0) = esprit::mode_to_normalized_angle(modes.modes(slot, 0), k, sys);
      m.y(1) = esprit::mode_to_normalized_angle(modes.modes(slot, 1), k, sys);
      m.subcarrier = k;
      m.slot = slot;
    }
  });

  pairing::Options opt;
  opt.domain = cfg.pairing_domain;
  opt.wrap_aware_distance = cfg.wrap_aware_distance;
  const auto state = pairing::pair_measurements(ms, num_paths, mix_seed(est_seed, 0xc157e2ULL),
                                                cfg.kmeans_restarts, opt);
  const auto angles = pairing::cluster_means_to_angles(state, sys);
  int discards = 0;
  for (int a : state.assignment) {
    if (a < 0) ++discards;
  }

  std::vector<PathTrack> paths(static_cast<std::size_t>(num_paths));
  std::vector<double> phis_tx(static_cast<std::size_t>(num_paths));
  std::vector<double> phis_rx(static_cast<std::size_t>(num_paths));
  for (int l = 0; l < num_paths; ++l) {
    paths[l].phi_tx = phis_tx[l] = angles[l].phi_tx;
    paths[l].phi_rx = phis_rx[l] = angles[l].phi_rx;
    paths[l].track.gains.resize(static_cast<std::size_t>(K));
  }
  for_each_subcarrier(K, slice_threads, [&](int k) {
    const auto a_tx = delaygain::reconstruct_steering(phis_tx, k, sys, sys.m_tx);
    const auto a_rx = delaygain::reconstruct_steering(phis_rx, k, sys, sys.m_rx);
    const auto gains = delaygain::estimate_gains(tensor.slice(k), a_tx, a_rx);
    for (int l = 0; l < num_paths; ++l) {
      paths[l].track.gains[static_cast<std::size_t>(k)] = gains(l);
    }
  });
  TrialResult res = finish_trial(paths, sys, cfg.scene.bs_position);
  res.pairing_iterations = state.iterations;
  res.pairing_discards = discards;
  res.pairing_converged = state.converged;
  return res;
}

TrialResult estimate_no_pairing(const ChannelTensor& tensor, const SystemConfig& sys,
                                int num_paths, const BenchConfig& cfg, std::uint64_t est_seed,
                                unsigned slice_threads) {
  const int K = tensor.num_subcarriers();
  std::vector<PathTrack> slots(static_cast<std::size_t>(num_paths));
  for (auto& s : slots) s.track.gains.resize(static_cast<std::size_t>(K));
  // Per-subcarrier slot angles, gathered in subcarrier order and reduced
  // sequentially afterwards.
  std::vector<double> phi_tx_k(static_cast<std::size_t>(K) * num_paths);
  std::vector<double> phi_rx_k(static_cast<std::size_t>(K) * num_paths);

  for_each_subcarrier(K, slice_threads, [&](int k) {
    const auto modes = esprit::esprit_2d(tensor.slice(k), num_paths, mix_seed(est_seed, k, 0x2d));
    std::vector<double> phis_tx(static_cast<std::size_t>(num_paths));
    std::vector<double> phis_rx(static_cast<std::size_t>(num_paths));
    for (int slot = 0; slot < num_paths; ++slot) {
      phis_tx[slot] = esprit::mode_to_normalized_angle(modes.modes(slot, 0), k, sys);
      phis_rx[slot] = esprit::mode_to_normalized_angle(modes.modes(slot, 1), k, sys);
      phi_tx_k[static_cast<std::size_t>(k) * num_paths + slot] = phis_tx[slot];
      phi_rx_k[static_cast<std::size_t>(k) * num_paths + slot] = phis_rx[slot];
    }
    // Steering rebuilt from this subcarrier's own slot angles (no fusion).
    const auto a_tx = delaygain::reconstruct_steering(phis_tx, k, sys, sys.m_tx);
    const auto a_rx = delaygain::reconstruct_steering(phis_rx, k, sys, sys.m_rx);
    const auto gains = delaygain::estimate_gains(tensor.slice(k), a_tx, a_rx);
    for (int slot = 0; slot < num_paths; ++slot) {
      slots[slot].track.gains[static_cast<std::size_t>(k)] = gains(slot);
    }
  });
  for (int slot = 0; slot < num_paths; ++slot) {
    double sum_tx = 0.0, sum_rx = 0.0;
    for (int k = 0; k < K; ++k) {
      sum_tx += phi_tx_k[static_cast<std::size_t>(k) * num_paths + slot];
      sum_rx += phi_rx_k[static_cast<std::size_t>(k) * num_paths + slot];
    }
    slots[slot].phi_tx = sum_tx / K;
    slots[slot].phi_rx = sum_rx / K;
  }
  return finish_trial(slots, sys, cfg.scene.bs_position);
}

TrialResult estimate_esprit3d(const ChannelTensor& tensor, const SystemConfig& sys, int num_paths,
                              const BenchConfig& cfg, std::uint64_t est_seed) {
  const auto dec = channel::decimate_subcarriers(tensor, cfg.baseline_k_max);
  const double delta_f_eff = sys.delta_f_hz * dec.stride;
  const auto plan =
      esprit::default_plan_3d(dec.tensor.m_tx(), dec.tensor.m_rx(), dec.tensor.num_subcarriers());
  const auto harmonics =
      esprit::esprit_3d(dec.tensor, num_paths, plan, delta_f_eff, mix_seed(est_seed, 0x3dULL));

  TrialResult res;
  for (const auto& h : harmonics) {
    locate::PathEstimate p;
    p.theta_tx = esprit::normalized_to_physical(h.phi_tx, sys);
    p.theta_rx = esprit::normalized_to_physical(h.phi_rx, sys);
    p.tau_s = h.tau_s;
    res.paths.push_back(p);
    res.gains.push_back(h.gain);
  }
  if (res.paths.size() >= 2) {
    res.loc = locate::locate_ue(res.paths, cfg.scene.bs_position);
  }
  return res;
}

}  // namespace

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::aoa_rad: return "aoa_rad";
    case Metric::aod_rad: return "aod_rad";
    case Metric::delay_ns: return "delay_ns";
    case Metric::position_m: return "position_m";
  }
  return "unknown";
}

Metric metric_from_name(const std::string& name) {
  if (name == "aoa_rad") return Metric::aoa_rad;
  if (name == "aod_rad") return Metric::aod_rad;
  if (name == "delay_ns") return Metric::delay_ns;
  if (name == "position_m") return Metric::position_m;
  fail(Errc::validation, "unknown metric: " + name);
}

int subcarriers_for_bandwidth(double bandwidth_hz, const SystemConfig& sys) {
  const auto k = static_cast<int>(std::llround(bandwidth_hz / sys.delta_f_hz));
  if (k < 1 || std::abs(k * sys.delta_f_hz - bandwidth_hz) > 1e-3) {
    fail(Errc::validation, "bandwidth must be a positive multiple of delta_f");
  }
  return k;
}

std::vector<std::vector<double>> slice_spectra(const ChannelTensor& tensor, int count) {
  const int n = std::min({count, tensor.m_tx(), tensor.m_rx()});
  if (n < 1) {
    fail(Errc::validation, "slice_spectra: need at least one singular value");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(tensor.num_subcarriers()));
  for (int k = 0; k < tensor.num_subcarriers(); ++k) {
    const Eigen::MatrixXcd slice = tensor.slice(k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(slice);
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = svd.singularValues()(i);
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_spectra_csv(const std::vector<std::vector<double>>& rows, const std::string& path) {
  if (rows.empty()) {
    fail(Errc::validation, "emit_spectra_csv: no rows");
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    fail(Errc::io, "emit_spectra_csv: cannot open " + path);
  }
  bool ok = std::fprintf(f, "subcarrier") > 0;
  for (std::size_t i = 0; i < rows.front().size(); ++i) {
    ok = ok && std::fprintf(f, ",sigma%zu", i + 1) > 0;
  }
  ok = ok && std::fprintf(f, "\n") > 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ok = ok && std::fprintf(f, "%zu", k) > 0;
    for (double v : rows[k]) ok = ok && std::fprintf(f, ",%.12g", v) > 0;
    ok = ok && std::fprintf(f, "\n") > 0;
  }
  std::fclose(f);
  if (!ok) {
    fail(Errc::io, "emit_spectra_csv: write failed for " + path);
  }
}

TrialTruth make_truth(const BenchConfig& cfg, const SystemConfig& sys_b, std::uint64_t seed,
                      int num_subcarriers, std::uint32_t trial_index) {
  TrialTruth truth;
  truth.paths = scene::build_scene(cfg.scene, sys_b, cfg.gain_model);
  truth.p_ue = cfg.scene.ue_position;
  truth.clock_bias_s = cfg.scene.clock_bias_s;
  auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(num_subcarriers), trial_index,
                               kPhaseTag));
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (auto& p : truth.paths) {
    p.gain *= std::polar(1.0, u(rng));
  }
  return truth;
}

TrialResult estimate_channel(const ChannelTensor& tensor, const SystemConfig& sys, int num_paths,
                             Method method, const BenchConfig& cfg, std::uint64_t est_seed,
                             unsigned slice_threads) {
  try {
    switch (method) {
      case Method::proposed:
        return estimate_proposed(tensor, sys, num_paths, cfg, est_seed, slice_threads);
      case Method::proposed_no_pairing:
        return estimate_no_pairing(tensor, sys, num_paths, cfg, est_seed, slice_threads);
      case Method::esprit3d:
        return estimate_esprit3d(tensor, sys, num_paths, cfg, est_seed);
    }
    fail(Errc::validation, "unknown method");
  } catch (const Error& e) {
    TrialResult res;
    res.failed = true;
    res.failure_code = e.code();
    res.failure = e.what();
    return res;
  }
}

TrialResult run_trial(const BenchConfig& cfg, Method method, double bandwidth_hz,
                      std::uint64_t seed, std::uint32_t trial_index) {
  const SystemConfig sys_b = sys_at_bandwidth(cfg.sys, bandwidth_hz);
  const int k = sys_b.num_subcarriers;
  const TrialTruth truth = make_truth(cfg, sys_b, seed, k, trial_index);
  ChannelTensor tensor = channel::synthesize(truth.paths, sys_b);
  const double variance = channel::noise_variance(sys_b);
  if (variance > 0.0) {
    tensor = channel::add_noise(
        tensor, variance, mix_seed(seed, static_cast<std::uint64_t>(k), trial_index, kNoiseTag));
  }
  const std::uint64_t est_seed =
      mix_seed(seed, static_cast<std::uint64_t>(k), trial_index, kEstimateTag);
  const unsigned slice_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                                 : std::max(1u, std::thread::hardware_concurrency());
  return estimate_channel(tensor, sys_b, static_cast<int>(truth.paths.size()), method, cfg,
                          est_seed, slice_threads);
}

ScoredErrors match_and_score(const TrialResult& result, const TrialTruth& truth) {
  const std::size_t num_paths = truth.paths.size();
  if (result.paths.size() != num_paths) {
    fail(Errc::validation, "match_and_score: path count mismatch");
  }
  if (num_paths > 6) {
    fail(Errc::validation, "match_and_score: exhaustive matching supports at most 6 paths");
  }
  std::vector<int> perm(num_paths);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t l = 0; l < num_paths; ++l) {
      const auto& e = result.paths[static_cast<std::size_t>(perm[l])];
      const auto& t = truth.paths[l];
      const double dtx = e.theta_tx - t.theta_tx;
      const double drx = e.theta_rx - t.theta_rx;
      cost += dtx * dtx + drx * drx;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ScoredErrors s;
  for (std::size_t l = 0; l < num_paths; ++l) {
    const auto& e = result.paths[static_cast<std::size_t>(best[l])];
    const auto& t = truth.paths[l];
    s.aod_sq.push_back((e.theta_tx - t.theta_tx) * (e.theta_tx - t.theta_tx));
    s.aoa_sq.push_back((e.theta_rx - t.theta_rx) * (e.theta_rx - t.theta_rx));
    s.delay_sq_s2.push_back((e.tau_s - t.tau_s) * (e.tau_s - t.tau_s));
  }
  const double dx = result.loc.p_ue.x - truth.p_ue.x;
  const double dy = result.loc.p_ue.y - truth.p_ue.y;
  s.position_sq_m2 = dx * dx + dy * dy;
  return s;
}

SweepResult sweep_bandwidth(const BenchConfig& cfg, const std::vector<Method>& methods, int trials,
                            std::uint64_t seed, bool verbose) {
  if (cfg.bandwidths_hz.empty()) {
    fail(Errc::validation, "sweep: no bandwidths configured");
  }
  if (trials < 1) {
    fail(Errc::validation, "sweep: trials must be >= 1");
  }
  for (double b : cfg.bandwidths_hz) {
    (void)subcarriers_for_bandwidth(b, cfg.sys);  // validates the grid
  }

  const std::size_t num_b = cfg.bandwidths_hz.size();
  const std::size_t num_m = methods.size();
  struct Cell {
    bool failed = true;
    ScoredErrors errors;
  };
  // [bandwidth][trial][method]
  std::vector<Cell> cells(num_b * static_cast<std::size_t>(trials) * num_m);
  auto cell_at = [&](std::size_t bi, std::size_t t, std::size_t mi) -> Cell& {
    return cells[(bi * trials + t) * num_m + mi];
  };

  std::atomic<std::size_t> next{0};
  const std::size_t num_tasks = num_b * static_cast<std::size_t>(trials);
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(num_tasks));

  auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= num_tasks) break;
      const std::size_t bi = task / trials;
      const auto trial = static_cast<std::uint32_t>(task % trials);
      const double bandwidth = cfg.bandwidths_hz[bi];
      try {
        const SystemConfig sys_b = sys_at_bandwidth(cfg.sys, bandwidth);
        const int k = sys_b.num_subcarriers;

        const TrialTruth truth = make_truth(cfg, sys_b, seed, k, trial);
        ChannelTensor tensor = channel::synthesize(truth.paths, sys_b);
        const double variance = channel::noise_variance(sys_b);
        if (variance > 0.0) {
          tensor = channel::add_noise(
              tensor, variance, mix_seed(seed, static_cast<std::uint64_t>(k), trial, kNoiseTag));
        }
        const std::uint64_t est_seed =
            mix_seed(seed, static_cast<std::uint64_t>(k), trial, kEstimateTag);
        for (std::size_t mi = 0; mi < num_m; ++mi) {
          TrialResult res = estimate_channel(tensor, sys_b, static_cast<int>(truth.paths.size()),
                                             methods[mi], cfg, est_seed);
          Cell& cell = cell_at(bi, trial, mi);
          if (res.failed) {
            cell.failed = true;
            if (verbose) {
              std::fprintf(stderr, "[sweep] %s B=%.4g MHz trial %u failed: %s\n",
                           method_name(methods[mi]).c_str(), bandwidth / 1e6, trial,
                           res.failure.c_str());
            }
            continue;
          }
          cell.failed = false;
          cell.errors = match_and_score(res, truth);
        }
        if (verbose && trial == 0) {
          std::fprintf(stderr, "[sweep] B=%.4g MHz started (K=%d)\n", bandwidth / 1e6, k);
        }
      } catch (const std::exception& e) {
        // Channel generation failed: the whole trial counts as a failure for
        // every method at this point.
        for (std::size_t mi = 0; mi < num_m; ++mi) cell_at(bi, trial, mi).failed = true;
        if (verbose) {
          std::fprintf(stderr, "[sweep] B=%.4g MHz trial %u draw failed: %s\n", bandwidth / 1e6,
                       trial, e.what());
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  SweepResult out;
  const auto thr = channel::narrowband_thresholds(cfg.sys, cfg.strictness);
  out.threshold_proposed_hz = thr.proposed_hz;
  out.threshold_reference_hz = thr.reference_hz;

  for (std::size_t mi = 0; mi < num_m; ++mi) {
    for (std::size_t bi = 0; bi < num_b; ++bi) {
      double aoa = 0.0, aod = 0.0, delay = 0.0, pos = 0.0;
      long path_terms = 0;
      int used = 0, failures = 0;
      for (int t = 0; t < trials; ++t) {
        const Cell& cell = cell_at(bi, static_cast<std::size_t>(t), mi);
        if (cell.failed) {
          ++failures;
          continue;
        }
        ++used;
        for (std::size_t l = 0; l < cell.errors.aoa_sq.size(); ++l) {
          aoa += cell.errors.aoa_sq[l];
          aod += cell.errors.aod_sq[l];
          delay += cell.errors.delay_sq_s2[l];
          ++path_terms;
        }
        pos += cell.errors.position_sq_m2;
      }
      auto push = [&](Metric metric, double sum, long terms) {
        RmseRecord r;
        r.method = methods[mi];
        r.bandwidth_hz = cfg.bandwidths_hz[bi];
        r.metric = metric;
        r.value = terms > 0 ? std::sqrt(sum / terms) : std::nan("");
        r.trials_used = used;
        r.failures = failures;
        r.seed = seed;
        out.records.push_back(r);
      };
      push(Metric::aoa_rad, aoa, path_terms);
      push(Metric::aod_rad, aod, path_terms);
      push(Metric::delay_ns, delay * 1e18, path_terms);  // s^2 -> ns^2
      push(Metric::position_m, pos, used);
    }
  }
  return out;
}

void emit_csv(const std::vector<RmseRecord>& records, const std::string& path) {
  if (records.empty()) {
    fail(Errc::validation, "emit_csv: no records");
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    fail(Errc::io, "emit_csv: cannot open " + path);
  }
  bool ok = std::fprintf(f, "method,bandwidth_hz,metric,value,trials_used,failures,seed\n") > 0;
  for (const auto& r : records) {
    ok = ok && std::fprintf(f, "%s,%.12g,%s,%.12g,%d,%d,%llu\n", method_name(r.method).c_str(),
                            r.bandwidth_hz, metric_name(r.metric).c_str(), r.value, r.trials_used,
                            r.failures, static_cast<unsigned long long>(r.seed)) > 0;
  }
  std::fclose(f);
  if (!ok) {
    fail(Errc::io, "emit_csv: write failed for " + path);
  }
}

std::vector<RmseRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(Errc::io, "parse_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    fail(Errc::io, "parse_csv: empty file " + path);
  }
  std::vector<RmseRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    RmseRecord r;
    std::getline(ss, field, ',');
    r.method = method_from_name(field);
    std::getline(ss, field, ',');
    r.bandwidth_hz = std::stod(field);
    std::getline(ss, field, ',');
    r.metric = metric_from_name(field);
    std::getline(ss, field, ',');
    r.value = std::stod(field);
    std::getline(ss, field, ',');
    r.trials_used = std::stoi(field);
    std::getline(ss, field, ',');
    r.failures = std::stoi(field);
    std::getline(ss, field, ',');
    r.seed = std::stoull(field);
    out.push_back(r);
  }
  return out;
}

}  // namespace wbesprit::bench
