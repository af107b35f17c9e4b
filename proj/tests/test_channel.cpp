#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "channel.hpp"
#include "error.hpp"
#include "scene.hpp"

using namespace wbesprit;
using channel::PathModes;

namespace {

SystemConfig small_sys(int m_tx, int m_rx, int k) {
  SystemConfig sys;
  sys.m_tx = m_tx;
  sys.m_rx = m_rx;
  sys.num_subcarriers = k;
  return sys;
}

std::vector<PathModes> reference_modes(const SystemConfig& sys) {
  SceneConfig sc;
  sc.paths_deg = {{-45.0, 45.0}, {-54.0, -62.0}, {65.0, 40.0}};
  std::vector<PathModes> modes;
  for (const auto& g : scene::build_scene(sc, sys)) modes.push_back(channel::to_modes(g, sys));
  return modes;
}

// Independent factorized evaluation: rank-one outer products of the
// narrowband steering vectors, entrywise-multiplied by the phase rotation
// tensor. Used as the cross-check against the direct synthesis route.
cplx factorized_entry(const std::vector<PathModes>& paths, const SystemConfig& sys, int m, int n,
                      int k) {
  cplx acc{0.0, 0.0};
  for (const auto& p : paths) {
    const cplx a_tx = std::polar(1.0, -2.0 * kPi * m * p.phi_tx);
    const cplx a_rx = std::polar(1.0, -2.0 * kPi * n * p.phi_rx);
    const cplx a_k = std::polar(1.0, -2.0 * kPi * k * sys.delta_f_hz * p.tau_s);
    acc += p.gain * a_tx * a_rx * a_k * channel::phase_rotation_entry(p, m, n, k, sys);
  }
  return acc;
}

}  // namespace

TEST_CASE("first entry is the plain gain sum") {
  SystemConfig sys = small_sys(4, 4, 4);
  std::vector<PathModes> paths = {{0.21, -0.33, 1e-7, {0.3, 0.7}}, {-0.4, 0.11, 2e-7, {-1.1, 0.2}}};
  const ChannelTensor h = channel::synthesize_modes(paths, sys);
  const cplx expected = paths[0].gain + paths[1].gain;
  CHECK(std::abs(h.at(0, 0, 0) - expected) < 1e-14);
}

TEST_CASE("single-path tensor has constant magnitude") {
  SystemConfig sys = small_sys(8, 8, 16);
  std::vector<PathModes> paths = {{0.31, -0.12, 1.5e-7, {0.4, -0.9}}};
  const ChannelTensor h = channel::synthesize_modes(paths, sys);
  const double mag = std::abs(paths[0].gain);
  for (int k = 0; k < 16; ++k) {
    for (int m = 0; m < 8; ++m) {
      for (int n = 0; n < 8; ++n) {
        CHECK(std::abs(h.at(m, n, k)) == doctest::Approx(mag).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("direct and factorized syntheses agree on the reference scene") {
  SystemConfig sys = small_sys(32, 32, 128);
  const auto paths = reference_modes(sys);
  const ChannelTensor h = channel::synthesize_modes(paths, sys);
  double scale = 0.0;
  for (int k = 0; k < sys.num_subcarriers; k += 13) {
    for (int m = 0; m < sys.m_tx; ++m) {
      for (int n = 0; n < sys.m_rx; ++n) {
        scale = std::max(scale, std::abs(h.at(m, n, k)));
      }
    }
  }
  for (int k = 0; k < sys.num_subcarriers; k += 13) {
    for (int m = 0; m < sys.m_tx; ++m) {
      for (int n = 0; n < sys.m_rx; ++n) {
        const cplx ref = factorized_entry(paths, sys, m, n, k);
        CHECK(std::abs(h.at(m, n, k) - ref) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("synthesis rejects out-of-range normalized angles") {
  SystemConfig sys = small_sys(4, 4, 4);
  std::vector<PathModes> paths = {{0.62, 0.0, 1e-7, {1.0, 0.0}}};
  CHECK_THROWS_AS(channel::synthesize_modes(paths, sys), Error);
}

TEST_CASE("phase rotation entry basics") {
  SystemConfig sys = small_sys(32, 32, 1024);
  PathModes p{0.5, 0.5, 2e-7, {1.0, 0.0}};
  CHECK(channel::phase_rotation_entry(p, 5, 9, 0, sys) == cplx{1.0, 0.0});
  CHECK(channel::phase_rotation_entry(p, 0, 0, 701, sys) == cplx{1.0, 0.0});

  const cplx d = channel::phase_rotation_entry(p, 31, 31, 1023, sys);
  CHECK(std::abs(d) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(std::arg(d)) == doctest::Approx(0.85398).epsilon(1e-3));
}

TEST_CASE("phase rotation entries stay unit modulus") {
  SystemConfig sys = small_sys(16, 16, 64);
  PathModes p{0.37, -0.44, 1.7e-7, {1.0, 0.0}};
  for (int k = 0; k < 64; k += 7) {
    for (int m = 0; m < 16; m += 3) {
      for (int n = 0; n < 16; n += 5) {
        CHECK(std::abs(channel::phase_rotation_entry(p, m, n, k, sys)) ==
              doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("narrowband thresholds of the reference arrays") {
  SystemConfig sys;
  const auto t = channel::narrowband_thresholds(sys, 10.0);
  CHECK(t.proposed_hz == doctest::Approx(13.93e6).epsilon(0.01));
  CHECK(t.reference_hz == doctest::Approx(87.5e6).epsilon(0.01));
}

TEST_CASE("doubling the summed array size halves the proposed threshold") {
  SystemConfig sys;
  const auto t1 = channel::narrowband_thresholds(sys, 10.0);
  sys.m_tx *= 2;
  sys.m_rx *= 2;
  const auto t2 = channel::narrowband_thresholds(sys, 10.0);
  CHECK(t2.proposed_hz == doctest::Approx(t1.proposed_hz / 2.0).epsilon(1e-14));
}

TEST_CASE("zero-variance noise is the identity") {
  SystemConfig sys = small_sys(4, 4, 8);
  std::vector<PathModes> paths = {{0.2, 0.1, 1e-7, {1.0, 0.5}}};
  const ChannelTensor h = channel::synthesize_modes(paths, sys);
  const ChannelTensor h2 = channel::add_noise(h, 0.0, 99);
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(h.data()[i] == h2.data()[i]);
  }
}

TEST_CASE("noise variance matches the request within one percent") {
  ChannelTensor zero(100, 100, 100);
  const double variance = 3.7e-4;
  const ChannelTensor noisy = channel::add_noise(zero, variance, 2024);
  double acc = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) acc += std::norm(noisy.data()[i]);
  const double sample = acc / static_cast<double>(noisy.size());
  CHECK(sample == doctest::Approx(variance).epsilon(0.01));
}

TEST_CASE("noise is deterministic in the seed") {
  ChannelTensor zero(8, 8, 8);
  const ChannelTensor a = channel::add_noise(zero, 1.0, 777);
  const ChannelTensor b = channel::add_noise(zero, 1.0, 777);
  const ChannelTensor c = channel::add_noise(zero, 1.0, 778);
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    all_equal = all_equal && a.data()[i] == b.data()[i];
    any_diff = any_diff || a.data()[i] != c.data()[i];
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("distinct noise entries are uncorrelated") {
  ChannelTensor zero(2, 2, 2);
  cplx acc{0.0, 0.0};
  double va = 0.0, vb = 0.0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const ChannelTensor n = channel::add_noise(zero, 1.0, 5000 + t);
    const cplx a = n.at(0, 0, 0), b = n.at(1, 1, 1);
    acc += a * std::conj(b);
    va += std::norm(a);
    vb += std::norm(b);
  }
  const double corr = std::abs(acc) / std::sqrt(va * vb);
  CHECK(corr < 1e-2);
}

TEST_CASE("narrowband switch yields an exactly rank-L tensor") {
  SystemConfig sys = small_sys(8, 8, 8);
  std::vector<PathModes> paths = {{0.11, -0.21, 0.8e-7, {1.0, 0.0}},
                                  {-0.32, 0.08, 1.9e-7, {0.5, 0.5}},
                                  {0.41, 0.35, 2.7e-7, {-0.2, 0.9}}};
  const ChannelTensor h = channel::synthesize_modes(paths, sys, /*narrowband_switch=*/true);

  // Unfold along each mode and check the numerical rank is exactly 3.
  const int L = 3;
  const int dims[3] = {8, 8, 8};
  for (int mode = 0; mode < 3; ++mode) {
    Eigen::MatrixXcd unfold(dims[mode], 64);
    for (int m = 0; m < 8; ++m) {
      for (int n = 0; n < 8; ++n) {
        for (int k = 0; k < 8; ++k) {
          const int idx[3] = {m, n, k};
          const int row = idx[mode];
          const int col = idx[(mode + 1) % 3] * 8 + idx[(mode + 2) % 3];
          unfold(row, col) = h.at(m, n, k);
        }
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(unfold);
    const auto& s = svd.singularValues();
    CHECK(s(L) / s(L - 1) < 1e-10);
  }
}

TEST_CASE("single-path conjugate symmetry under negated frequencies") {
  SystemConfig sys = small_sys(6, 5, 7);
  std::vector<PathModes> fwd = {{0.27, -0.15, 1.3e-7, {0.8, 0.0}}};
  std::vector<PathModes> neg = {{-0.27, 0.15, -1.3e-7, {0.8, 0.0}}};
  const ChannelTensor a = channel::synthesize_modes(fwd, sys);
  const ChannelTensor b = channel::synthesize_modes(neg, sys);
  for (int k = 0; k < 7; ++k) {
    for (int m = 0; m < 6; ++m) {
      for (int n = 0; n < 5; ++n) {
        CHECK(std::abs(b.at(m, n, k) - std::conj(a.at(m, n, k))) < 1e-13);
      }
    }
  }
}

TEST_CASE("override drives the noise variance") {
  SystemConfig sys;
  sys.noise_variance_override = 1.25e-9;
  CHECK(channel::noise_variance(sys) == 1.25e-9);
  sys.noise_variance_override = 0.0;
  CHECK(channel::noise_variance(sys) == 0.0);
  sys.noise_variance_override.reset();
  CHECK(channel::noise_variance(sys) > 0.0);
}

TEST_CASE("budget noise variance scales with delta_f, not with K") {
  SystemConfig sys;
  const double v1 = channel::noise_variance(sys);
  sys.num_subcarriers *= 4;
  CHECK(channel::noise_variance(sys) == v1);
  sys.delta_f_hz *= 2.0;
  CHECK(channel::noise_variance(sys) == doctest::Approx(2.0 * v1).epsilon(1e-12));
}

TEST_CASE("subcarrier decimation keeps the stride grid") {
  SystemConfig sys = small_sys(2, 2, 256);
  std::vector<PathModes> paths = {{0.2, 0.1, 1e-7, {1.0, 0.0}}};
  const ChannelTensor h = channel::synthesize_modes(paths, sys);
  const auto dec = channel::decimate_subcarriers(h, 64);
  CHECK(dec.stride == 4);
  CHECK(dec.tensor.num_subcarriers() == 64);
  for (int k = 0; k < 64; ++k) {
    CHECK(dec.tensor.at(1, 0, k) == h.at(1, 0, 4 * k));
  }
  const auto same = channel::decimate_subcarriers(h, 256);
  CHECK(same.stride == 1);
  CHECK(same.tensor.num_subcarriers() == 256);
}

TEST_CASE("tensor dump round trip") {
  SystemConfig sys = small_sys(3, 4, 5);
  std::vector<PathModes> paths = {{0.2, -0.3, 1e-7, {0.7, -0.4}}};
  const ChannelTensor h = channel::synthesize_modes(paths, sys);
  const std::string path = "tensor_roundtrip.wbct";
  channel::dump_tensor(h, path);
  const ChannelTensor r = channel::load_tensor(path);
  REQUIRE(r.m_tx() == 3);
  REQUIRE(r.m_rx() == 4);
  REQUIRE(r.num_subcarriers() == 5);
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(std::abs(r.data()[i] - h.data()[i]) < 1e-6);  // float32 payload
  }
  std::remove(path.c_str());
}
