#include "pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "error.hpp"
#include "esprit.hpp"
#include "rng.hpp"

namespace wbesprit::pairing {

namespace {

double component_delta(double a, double b, bool wrap) {
  double d = a - b;
  if (wrap) d -= std::round(d);  // normalized angles live on a unit torus
  return d;
}

}  // namespace

double distance_sq(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Options& opt) {
  const double dx = component_delta(a(0), b(0), opt.wrap_aware_distance);
  const double dy = component_delta(a(1), b(1), opt.wrap_aware_distance);
  switch (opt.domain) {
    case PairingDomain::aod:
      return dx * dx;
    case PairingDomain::aoa:
      return dy * dy;
    case PairingDomain::both:
    default:
      return dx * dx + dy * dy;
  }
}

double objective(const ClusterState& state, const std::vector<AngleMeasurement>& ms,
                 const Options& opt) {
  double sum = 0.0;
  for (std::size_t n = 0; n < ms.size(); ++n) {
    const int j = state.assignment[n];
    if (j >= 0) sum += distance_sq(ms[n].y, state.means[static_cast<std::size_t>(j)], opt);
  }
  return sum;
}

ClusterState kmeans_pair(const std::vector<AngleMeasurement>& ms, int l, std::uint64_t seed,
                         const Options& opt) {
  const std::size_t n = ms.size();
  if (l < 1 || n < static_cast<std::size_t>(l)) {
    fail(Errc::validation, "kmeans_pair: need at least L measurements");
  }

  ClusterState state;
  state.means.resize(static_cast<std::size_t>(l));
  state.assignment.assign(n, -1);

  auto rng = make_rng(seed);
  if (opt.farthest_point_init) {
    // First seed drawn uniformly, then greedy max-min-distance picks.
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    state.means[0] = ms[pick(rng)].y;
    for (int j = 1; j < l; ++j) {
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int jj = 0; jj < j; ++jj) {
          nearest = std::min(nearest,
                             distance_sq(ms[i].y, state.means[static_cast<std::size_t>(jj)], opt));
        }
        if (nearest > far_d) {
          far_d = nearest;
          far = i;
        }
      }
      state.means[static_cast<std::size_t>(j)] = ms[far].y;
    }
  } else {
    // Initialization: l measurements drawn uniformly without replacement.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int j = 0; j < l; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, n - 1);
      std::swap(pool[static_cast<std::size_t>(j)], pool[pick(rng)]);
      state.means[static_cast<std::size_t>(j)] = ms[pool[static_cast<std::size_t>(j)]].y;
    }
  }

  std::vector<int> counts(static_cast<std::size_t>(l));
  std::vector<Eigen::Vector2d> sums(static_cast<std::size_t>(l));
  for (state.iterations = 0; state.iterations < opt.max_iters; ++state.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = distance_sq(ms[i].y, state.means[0], opt);
      for (int j = 1; j < l; ++j) {
        const double d = distance_sq(ms[i].y, state.means[static_cast<std::size_t>(j)], opt);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (state.assignment[i] != best) {
        state.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) {
      state.converged = true;
      break;
    }

    std::fill(counts.begin(), counts.end(), 0);
    std::fill(sums.begin(), sums.end(), Eigen::Vector2d::Zero().eval());
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(state.assignment[i]);
      sums[j] += ms[i].y;
      ++counts[j];
    }
    for (int j = 0; j < l; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      if (counts[ju] > 0) {
        state.means[ju] = sums[ju] / counts[ju];
      } else {
        // Re-seed an emptied cluster at the measurement farthest from its
        // current mean.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = distance_sq(ms[i].y, state.means[ju], opt);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        state.means[ju] = ms[far].y;
      }
    }
  }
  return state;
}

ClusterState enforce_constraint(const ClusterState& in, const std::vector<AngleMeasurement>& ms,
                                const Options& opt) {
  ClusterState state = in;
  const int l = static_cast<int>(state.means.size());

  int max_k = 0;
  for (const auto& m : ms) max_k = std::max(max_k, m.subcarrier);

  // best[(j, k)] = retained measurement index for cluster j on subcarrier k.
  std::vector<std::ptrdiff_t> best(static_cast<std::size_t>(l) * (max_k + 1), -1);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const int j = state.assignment[i];
    if (j < 0) continue;
    const auto key = static_cast<std::size_t>(j) * (max_k + 1) + ms[i].subcarrier;
    const std::ptrdiff_t cur = best[key];
    if (cur < 0) {
      best[key] = static_cast<std::ptrdiff_t>(i);
      continue;
    }
    const double d_new = distance_sq(ms[i].y, state.means[static_cast<std::size_t>(j)], opt);
    const double d_cur =
        distance_sq(ms[static_cast<std::size_t>(cur)].y, state.means[static_cast<std::size_t>(j)], opt);
    if (d_new < d_cur) {
      state.assignment[static_cast<std::size_t>(cur)] = -1;
      best[key] = static_cast<std::ptrdiff_t>(i);
    } else {
      state.assignment[i] = -1;
    }
  }

  std::vector<int> counts(static_cast<std::size_t>(l), 0);
  std::vector<Eigen::Vector2d> sums(static_cast<std::size_t>(l), Eigen::Vector2d::Zero());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const int j = state.assignment[i];
    if (j < 0) continue;
    sums[static_cast<std::size_t>(j)] += ms[i].y;
    ++counts[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < l; ++j) {
    if (counts[static_cast<std::size_t>(j)] == 0) {
      fail(Errc::pairing_failure, "enforce_constraint: cluster emptied by the discard rule");
    }
    state.means[static_cast<std::size_t>(j)] =
        sums[static_cast<std::size_t>(j)] / counts[static_cast<std::size_t>(j)];
  }
  return state;
}

ClusterState pair_measurements(const std::vector<AngleMeasurement>& ms, int l, std::uint64_t seed,
                               int restarts, const Options& opt) {
  if (restarts < 1) restarts = 1;
  bool have_best = false;
  ClusterState best;
  std::size_t best_discards = 0;
  double best_obj = std::numeric_limits<double>::infinity();

  // Candidate 0 uses the deterministic farthest-point seeding; the remaining
  // restarts use the plain uniform initialization.
  for (int r = 0; r <= restarts; ++r) {
    ClusterState s;
    Options ropt = opt;
    ropt.farthest_point_init = (r == 0);
    try {
      s = enforce_constraint(kmeans_pair(ms, l, mix_seed(seed, 0xba1dULL, r), ropt), ms, opt);
    } catch (const Error&) {
      continue;
    }
    std::size_t discards = 0;
    std::size_t retained = 0;
    for (int a : s.assignment) {
      if (a < 0) {
        ++discards;
      } else {
        ++retained;
      }
    }
    const double obj = retained > 0 ? objective(s, ms, opt) / retained
                                    : std::numeric_limits<double>::infinity();
    if (!have_best || discards < best_discards ||
        (discards == best_discards && obj < best_obj)) {
      have_best = true;
      best = std::move(s);
      best_discards = discards;
      best_obj = obj;
    }
  }
  if (!have_best) {
    fail(Errc::pairing_failure, "pair_measurements: every restart left an empty cluster");
  }
  return best;
}

std::vector<PathAngles> cluster_means_to_angles(const ClusterState& state,
                                                const SystemConfig& sys) {
  std::vector<PathAngles> out;
  out.reserve(state.means.size());
  for (const auto& mu : state.means) {
    PathAngles a;
    a.phi_tx = mu(0);
    a.phi_rx = mu(1);
    a.theta_tx = esprit::normalized_to_physical(a.phi_tx, sys);
    a.theta_rx = esprit::normalized_to_physical(a.phi_rx, sys);
    out.push_back(a);
  }
  return out;
}

}  // namespace wbesprit::pairing
