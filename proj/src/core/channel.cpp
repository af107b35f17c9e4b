#include "channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>

#include "error.hpp"
#include "rng.hpp"

namespace wbesprit::channel {

double normalized_angle(double theta_rad, const SystemConfig& sys) {
  return sys.spacing_wavelengths * std::sin(theta_rad);
}

PathModes to_modes(const PathGeometry& geom, const SystemConfig& sys) {
  PathModes m;
  m.phi_tx = normalized_angle(geom.theta_tx, sys);
  m.phi_rx = normalized_angle(geom.theta_rx, sys);
  m.tau_s = geom.tau_s;
  m.gain = geom.gain * std::polar(1.0, -2.0 * kPi * sys.fc_hz * geom.tau_s);
  return m;
}

ChannelTensor synthesize_modes(const std::vector<PathModes>& paths, const SystemConfig& sys,
                               bool narrowband_switch) {
  const int M = sys.m_tx, N = sys.m_rx, K = sys.num_subcarriers;
  if (M < 1 || N < 1 || K < 1) {
    fail(Errc::validation, "synthesize: empty tensor dimensions");
  }
  for (const auto& p : paths) {
    if (std::abs(p.phi_tx) > 0.5 + 1e-12 || std::abs(p.phi_rx) > 0.5 + 1e-12) {
      fail(Errc::validation, "synthesize: normalized angle outside [-1/2, 1/2]");
    }
  }
  ChannelTensor h(M, N, K);
  Eigen::VectorXcd a_tx(M), a_rx(N);
  for (int k = 0; k < K; ++k) {
    auto slice = h.slice(k);
    const double squint = narrowband_switch ? 1.0 : sys.squint(k);
    for (const auto& p : paths) {
      const double wt = -2.0 * kPi * p.phi_tx * squint;
      const double wr = -2.0 * kPi * p.phi_rx * squint;
      for (int m = 0; m < M; ++m) a_tx(m) = std::polar(1.0, wt * m);
      for (int n = 0; n < N; ++n) a_rx(n) = std::polar(1.0, wr * n);
      const cplx coeff = p.gain * std::polar(1.0, -2.0 * kPi * k * sys.delta_f_hz * p.tau_s);
      slice.noalias() += coeff * a_tx * a_rx.transpose();
    }
  }
  return h;
}

ChannelTensor synthesize(const std::vector<PathGeometry>& paths, const SystemConfig& sys,
                         bool narrowband_switch) {
  std::vector<PathModes> modes;
  modes.reserve(paths.size());
  for (const auto& g : paths) modes.push_back(to_modes(g, sys));
  return synthesize_modes(modes, sys, narrowband_switch);
}

cplx phase_rotation_entry(const PathModes& path, int m_tx, int m_rx, int k,
                          const SystemConfig& sys) {
  const double phase =
      -2.0 * kPi * k * sys.delta_f_hz * (m_tx * path.phi_tx + m_rx * path.phi_rx) / sys.fc_hz;
  return std::polar(1.0, phase);
}

NarrowbandThresholds narrowband_thresholds(const SystemConfig& sys, double strictness) {
  if (strictness <= 0.0) {
    fail(Errc::validation, "narrowband_thresholds: strictness must be positive");
  }
  NarrowbandThresholds t;
  // 2*pi*(Mtx+Mrx)*B*d/(fc*lambda) = 1/strictness, solved for B.
  const double m_sum = sys.m_tx + sys.m_rx;
  t.proposed_hz = sys.fc_hz / (strictness * 2.0 * kPi * m_sum * sys.spacing_wavelengths);
  t.reference_hz = sys.fc_hz / (strictness * std::max(sys.m_tx, sys.m_rx));
  return t;
}

double noise_variance(const SystemConfig& sys) {
  if (sys.noise_variance_override) {
    if (*sys.noise_variance_override < 0.0) {
      fail(Errc::validation, "noise_variance_override must be >= 0");
    }
    return *sys.noise_variance_override;
  }
  const double n0_mw_hz = std::pow(10.0, sys.n0_dbm_hz / 10.0);
  const double nf_lin = std::pow(10.0, sys.nf_db / 10.0);
  const double pt_mw = std::pow(10.0, sys.pt_dbm / 10.0);
  const double excess = std::pow(10.0, sys.noise_excess_db / 10.0);
  return n0_mw_hz * nf_lin * sys.delta_f_hz * excess / (pt_mw * sys.n_pilots);
}

ChannelTensor add_noise(const ChannelTensor& h, double variance, std::uint64_t seed) {
  if (variance < 0.0) {
    fail(Errc::validation, "add_noise: negative variance");
  }
  ChannelTensor out = h;
  if (variance == 0.0) return out;
  auto rng = make_rng(seed);
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  cplx* p = out.data();
  const std::size_t total = out.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double re = n(rng);
    const double im = n(rng);
    p[i] += cplx{re, im};
  }
  return out;
}

Decimated decimate_subcarriers(const ChannelTensor& h, int max_k) {
  if (max_k < 2) {
    fail(Errc::validation, "decimate_subcarriers: max_k must be >= 2");
  }
  const int K = h.num_subcarriers();
  if (K <= max_k) {
    return {h, 1};
  }
  const int stride = (K + max_k - 1) / max_k;
  const int kept = (K - 1) / stride + 1;
  ChannelTensor out(h.m_tx(), h.m_rx(), kept);
  for (int i = 0; i < kept; ++i) {
    out.slice(i) = h.slice(i * stride);
  }
  return {std::move(out), stride};
}

void dump_tensor(const ChannelTensor& h, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    fail(Errc::io, "dump_tensor: cannot open " + path);
  }
  const char magic[4] = {'W', 'B', 'C', 'T'};
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(h.m_tx()),
                                 static_cast<std::uint32_t>(h.m_rx()),
                                 static_cast<std::uint32_t>(h.num_subcarriers())};
  bool ok = std::fwrite(magic, 1, 4, f) == 4 && std::fwrite(dims, 4, 3, f) == 3;
  const cplx* p = h.data();
  std::vector<float> buf(2 * h.m_rx());
  for (std::size_t i = 0; ok && i < h.size(); i += h.m_rx()) {
    for (int j = 0; j < h.m_rx(); ++j) {
      buf[2 * j] = static_cast<float>(p[i + j].real());
      buf[2 * j + 1] = static_cast<float>(p[i + j].imag());
    }
    ok = std::fwrite(buf.data(), 4, buf.size(), f) == buf.size();
  }
  std::fclose(f);
  if (!ok) {
    fail(Errc::io, "dump_tensor: short write to " + path);
  }
}

ChannelTensor load_tensor(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    fail(Errc::io, "load_tensor: cannot open " + path);
  }
  char magic[4];
  std::uint32_t dims[3];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "WBCT", 4) != 0 ||
      std::fread(dims, 4, 3, f) != 3) {
    std::fclose(f);
    fail(Errc::io, "load_tensor: bad header in " + path);
  }
  ChannelTensor h(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]));
  std::vector<float> buf(2 * h.m_rx());
  cplx* p = h.data();
  for (std::size_t i = 0; i < h.size(); i += h.m_rx()) {
    if (std::fread(buf.data(), 4, buf.size(), f) != buf.size()) {
      std::fclose(f);
      fail(Errc::io, "load_tensor: truncated file " + path);
    }
    for (int j = 0; j < h.m_rx(); ++j) {
      p[i + j] = cplx{buf[2 * j], buf[2 * j + 1]};
    }
  }
  std::fclose(f);
  return h;
}

}  // namespace wbesprit::channel
