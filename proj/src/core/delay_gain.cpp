#include "delay_gain.hpp"

#include <cmath>

#include "error.hpp"
#include "linalg.hpp"

namespace wbesprit::delaygain {

MatrixXcd reconstruct_steering(const std::vector<double>& phis, int k, const SystemConfig& sys,
                               int num_antennas) {
  if (phis.empty()) {
    fail(Errc::validation, "reconstruct_steering: no paths");
  }
  MatrixXcd a(num_antennas, static_cast<Eigen::Index>(phis.size()));
  const double squint = sys.squint(k);
  for (std::size_t l = 0; l < phis.size(); ++l) {
    const double w = -2.0 * kPi * squint * phis[l];
    for (int m = 0; m < num_antennas; ++m) {
      a(m, static_cast<Eigen::Index>(l)) = std::polar(1.0, w * m);
    }
  }
  return a;
}

VectorXcd estimate_gains(ChannelTensor::SliceMap h_k, const MatrixXcd& a_tx,
                         const MatrixXcd& a_rx) {
  return linalg::khatri_rao_gains(h_k, a_tx, a_rx);
}

VectorXcd estimate_gains(const MatrixXcd& h_k, const MatrixXcd& a_tx, const MatrixXcd& a_rx) {
  return linalg::khatri_rao_gains(h_k, a_tx, a_rx);
}

VectorXd unwrap_phases(const std::vector<cplx>& values) {
  VectorXd phases(static_cast<Eigen::Index>(values.size()));
  double prev = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] == cplx{0.0, 0.0}) {
      fail(Errc::validation, "unwrap_phases: zero gain sample");
    }
    const double raw = std::arg(values[k]);
    if (k == 0) {
      acc = raw;
    } else {
      double delta = raw - prev;
      delta -= 2.0 * kPi * std::floor((delta + kPi) / (2.0 * kPi));
      acc += delta;
    }
    prev = raw;
    phases(static_cast<Eigen::Index>(k)) = acc;
  }
  return phases;
}

DelayGainEstimate estimate_delay_gain(const GainTrack& track, const SystemConfig& sys) {
  const auto n = static_cast<Eigen::Index>(track.gains.size());
  if (n < 2) {
    fail(Errc::underdetermined, "estimate_delay_gain: need at least two subcarriers");
  }

  const VectorXd phase = unwrap_phases(track.gains);
  VectorXd logmag(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    logmag(k) = std::log(std::abs(track.gains[static_cast<std::size_t>(k)]));
  }

  // Closed-form simple linear regression on the subcarrier index.
  const double kb = (n - 1) / 2.0;
  double sxx = 0.0, sxp = 0.0, sxm = 0.0, sp = 0.0, sm = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double xc = k - kb;
    sxx += xc * xc;
    sxp += xc * phase(k);
    sxm += xc * logmag(k);
    sp += phase(k);
    sm += logmag(k);
  }
  const double phase_slope = sxp / sxx;
  const double phase_icpt = sp / n - phase_slope * kb;
  const double mag_slope = sxm / sxx;
  const double mag_icpt = sm / n - mag_slope * kb;

  DelayGainEstimate est;
  est.tau_s = -phase_slope / (2.0 * kPi * sys.delta_f_hz);
  est.magnitude_slope = mag_slope;
  // Undo the carrier term at k = 0; the residue is the gain phase modulo the
  // carrier wrap.
  double gain_phase = phase_icpt + 2.0 * kPi * sys.fc_hz * est.tau_s;
  gain_phase -= 2.0 * kPi * std::floor((gain_phase + kPi) / (2.0 * kPi));
  est.gain = std::polar(std::exp(mag_icpt), gain_phase);
  return est;
}

}  // namespace wbesprit::delaygain
