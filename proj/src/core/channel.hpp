#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace wbesprit {

// Frequency-domain MIMO channel, stored as K contiguous M_tx x M_rx slices
// (subcarrier-major, tx-row-major within a slice).
class ChannelTensor {
public:
  ChannelTensor() = default;
  ChannelTensor(int m_tx, int m_rx, int num_subcarriers)
      : m_tx_(m_tx), m_rx_(m_rx), k_(num_subcarriers),
        data_(static_cast<std::size_t>(m_tx) * m_rx * num_subcarriers, cplx{0.0, 0.0}) {}

  int m_tx() const { return m_tx_; }
  int m_rx() const { return m_rx_; }
  int num_subcarriers() const { return k_; }
  std::size_t size() const { return data_.size(); }

  cplx& at(int tx, int rx, int k) { return data_[index(tx, rx, k)]; }
  const cplx& at(int tx, int rx, int k) const { return data_[index(tx, rx, k)]; }

  const cplx* data() const { return data_.data(); }
  cplx* data() { return data_.data(); }

  using SliceMap = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using MutableSliceMap = Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  SliceMap slice(int k) const {
    return SliceMap(data_.data() + static_cast<std::size_t>(k) * m_tx_ * m_rx_, m_tx_, m_rx_);
  }
  MutableSliceMap slice(int k) {
    return MutableSliceMap(data_.data() + static_cast<std::size_t>(k) * m_tx_ * m_rx_, m_tx_, m_rx_);
  }

private:
  std::size_t index(int tx, int rx, int k) const {
    return (static_cast<std::size_t>(k) * m_tx_ + tx) * m_rx_ + rx;
  }

  int m_tx_ = 0;
  int m_rx_ = 0;
  int k_ = 0;
  std::vector<cplx> data_;
};

namespace channel {

// Harmonic description of one path in normalized units; gain is the full
// complex coefficient multiplying the steering factors (the breve-alpha of
// the channel equation).
struct PathModes {
  double phi_tx = 0.0;
  double phi_rx = 0.0;
  double tau_s = 0.0;
  cplx gain{1.0, 0.0};
};

// Normalized spatial frequency d*sin(theta)/lambda for one side.
double normalized_angle(double theta_rad, const SystemConfig& sys);

PathModes to_modes(const PathGeometry& geom, const SystemConfig& sys);

// Wideband synthesis. With narrowband_switch the squint factor 1 + k*df/fc is
// forced to 1 (exact trilinear model); the delay phases are unaffected.
ChannelTensor synthesize_modes(const std::vector<PathModes>& paths, const SystemConfig& sys,
                               bool narrowband_switch = false);
ChannelTensor synthesize(const std::vector<PathGeometry>& paths, const SystemConfig& sys,
                         bool narrowband_switch = false);

// Entry of the phase rotation tensor D_l for the given path.
cplx phase_rotation_entry(const PathModes& path, int m_tx, int m_rx, int k,
                          const SystemConfig& sys);

struct NarrowbandThresholds {
  double proposed_hz = 0.0;
  double reference_hz = 0.0;
};

// Bandwidths up to which the narrowband model holds: the perturbation-based
// bound (solved for B) and the per-array reference bound fc/(s*max(M)).
// strictness is the factor substituted for "<<".
NarrowbandThresholds narrowband_thresholds(const SystemConfig& sys, double strictness = 10.0);

// Per-entry variance of the channel estimation error.
double noise_variance(const SystemConfig& sys);

// Adds circularly-symmetric complex white Gaussian noise of the given
// per-entry variance; deterministic in the seed.
ChannelTensor add_noise(const ChannelTensor& h, double variance, std::uint64_t seed);

// Uniform subcarrier decimation to at most max_k subcarriers; returns the
// decimated tensor and the stride (effective spacing = stride * delta_f).
struct Decimated {
  ChannelTensor tensor;
  int stride = 1;
};
Decimated decimate_subcarriers(const ChannelTensor& h, int max_k);

// Binary dump: 16-byte header (magic "WBCT", u32 M_tx, u32 M_rx, u32 K,
// little-endian), then float32 re/im pairs in subcarrier-major,
// tx-row-major order.
void dump_tensor(const ChannelTensor& h, const std::string& path);
ChannelTensor load_tensor(const std::string& path);

}  // namespace channel
}  // namespace wbesprit
