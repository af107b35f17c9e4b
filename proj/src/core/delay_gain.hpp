#pragma once

#include <Eigen/Dense>
#include <vector>

#include "channel.hpp"
#include "types.hpp"

namespace wbesprit::delaygain {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Steering matrix for one side at subcarrier k, rebuilt from paired
// normalized angles with the squint factor 1 + k*df/fc.
MatrixXcd reconstruct_steering(const std::vector<double>& phis, int k, const SystemConfig& sys,
                               int num_antennas);

// Per-subcarrier complex gains from the slice and both steering matrices
// (Khatri-Rao least squares).
VectorXcd estimate_gains(ChannelTensor::SliceMap h_k, const MatrixXcd& a_tx,
                         const MatrixXcd& a_rx);
VectorXcd estimate_gains(const MatrixXcd& h_k, const MatrixXcd& a_tx, const MatrixXcd& a_rx);

// Per-path gain sequence over subcarriers.
struct GainTrack {
  std::vector<cplx> gains;
};

struct DelayGainEstimate {
  double tau_s = 0.0;
  cplx gain{0.0, 0.0};
  // Fitted slope of the log-magnitude channel (should be ~0; diagnostic).
  double magnitude_slope = 0.0;
};

// Delay and gain from the complex-log regression over subcarriers: the
// unwrapped phase is regressed on the subcarrier index (slope -> delay,
// intercept absorbs the wrapped carrier term together with the gain phase),
// and the log magnitude on the same basis. The gain phase is identified only
// modulo the carrier wrap.
DelayGainEstimate estimate_delay_gain(const GainTrack& track, const SystemConfig& sys);

// Phase unwrapping along the subcarrier axis (increments folded to (-pi, pi]).
VectorXd unwrap_phases(const std::vector<cplx>& values);

}  // namespace wbesprit::delaygain
