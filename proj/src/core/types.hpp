#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace wbesprit {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

using Position2D = Vec2;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Ground truth for one propagation path. tau_s includes the clock bias.
// travel_before_reflection_m is the signed distance from the BS to the
// scatterer along the departure direction (negative when the intersection of
// the two angle loci lies behind the BS array plane); for LOS it is unused.
struct PathGeometry {
  bool is_los = false;
  double theta_tx = 0.0;  // radians, (-pi/2, pi/2)
  double theta_rx = 0.0;  // radians, (-pi/2, pi/2)
  double tau_s = 0.0;     // seconds, includes clock bias
  cplx gain{1.0, 0.0};    // alpha_l (without the carrier phase term)
  std::optional<Position2D> scatterer;
  double travel_before_reflection_m = 0.0;
};

struct SceneConfig {
  Position2D bs_position{0.0, 40.0};
  Position2D ue_position{40.0, 0.0};
  double clock_bias_s = 0.0;
  // (AOD, AOA) in degrees; the first entry is the LOS path and is forced
  // consistent with the BS/UE geometry.
  std::vector<std::pair<double, double>> paths_deg;
  double reflection_loss_db = 3.0;
};

struct SystemConfig {
  double fc_hz = 28e9;
  double delta_f_hz = 120e3;
  int num_subcarriers = 128;
  int m_tx = 32;
  int m_rx = 32;
  double spacing_wavelengths = 0.5;  // d_i / lambda_c, both sides
  double pt_dbm = 15.0;
  double n0_dbm_hz = -174.0;
  double nf_db = 8.0;
  int n_pilots = 64;
  // Per-entry noise variance of the channel estimate. If set, used verbatim;
  // otherwise derived from the per-subcarrier link budget (see
  // noise_variance()).
  std::optional<double> noise_variance_override;
  // Extra loss on top of the link-budget noise floor, for physical-units
  // studies with the free-space gain model.
  double noise_excess_db = 0.0;

  double wavelength_m() const { return kSpeedOfLight / fc_hz; }
  double spacing_m() const { return spacing_wavelengths * wavelength_m(); }
  double bandwidth_hz() const { return num_subcarriers * delta_f_hz; }
  // Squint factor 1 + k*delta_f/fc for subcarrier k.
  double squint(int k) const { return 1.0 + static_cast<double>(k) * delta_f_hz / fc_hz; }
};

enum class Method {
  proposed,
  proposed_no_pairing,
  esprit3d,
};

enum class PairingDomain {
  both,
  aoa,
  aod,
};

// Path gain magnitude model used when building scenes for the bench:
// reflection_only normalizes the direct path to unit gain and applies only
// the reflection loss to bounced paths; free_space applies the full
// distance law on top of the reflection loss.
enum class GainModel {
  reflection_only,
  free_space,
};

}  // namespace wbesprit
