#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "types.hpp"

namespace wbesprit::pairing {

// One per-subcarrier auto-paired angle estimate: y = (phi_tx, phi_rx).
struct AngleMeasurement {
  Eigen::Vector2d y;
  int subcarrier = 0;
  int slot = 0;  // within-subcarrier energy rank
};

struct Options {
  int max_iters = 100;
  PairingDomain domain = PairingDomain::both;
  bool wrap_aware_distance = false;
  // Greedy max-min-distance seeding instead of uniform draws; used by the
  // restart wrapper as one deterministic candidate.
  bool farthest_point_init = false;
};

struct ClusterState {
  std::vector<Eigen::Vector2d> means;
  std::vector<int> assignment;  // cluster index per measurement, -1 = discarded
  int iterations = 0;
  bool converged = false;
};

// Squared distance in the configured domain (optionally wrap-aware on the
// unit torus of normalized angles).
double distance_sq(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Options& opt);

// K-means objective over retained measurements.
double objective(const ClusterState& state, const std::vector<AngleMeasurement>& ms,
                 const Options& opt);

// Plain alternating K-means with nearest-mean assignment and mean update,
// initialized from l measurements drawn without replacement; runs until the
// assignments are a fixed point or max_iters. A cluster emptied during
// iteration is re-seeded at the measurement farthest from its current mean.
ClusterState kmeans_pair(const std::vector<AngleMeasurement>& ms, int l, std::uint64_t seed,
                         const Options& opt = {});

// Constraint repair: within each (cluster, subcarrier) pair with multiplicity
// above one, keep the measurement nearest the cluster mean and discard the
// rest; means are then recomputed over the retained set. Throws
// pairing_failure if a cluster ends up empty.
ClusterState enforce_constraint(const ClusterState& state, const std::vector<AngleMeasurement>& ms,
                                const Options& opt = {});

// Multi-restart wrapper: runs kmeans_pair + enforce_constraint `restarts`
// times with derived seeds and keeps the best constrained solution
// (fewest discards, then lowest mean squared distance).
ClusterState pair_measurements(const std::vector<AngleMeasurement>& ms, int l, std::uint64_t seed,
                               int restarts, const Options& opt = {});

struct PathAngles {
  double phi_tx = 0.0;
  double phi_rx = 0.0;
  double theta_tx = 0.0;
  double theta_rx = 0.0;
};

// Cluster means read off as per-path normalized angles plus their physical
// counterparts.
std::vector<PathAngles> cluster_means_to_angles(const ClusterState& state,
                                                const SystemConfig& sys);

}  // namespace wbesprit::pairing
