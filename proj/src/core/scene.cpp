#include "scene.hpp"

#include <cmath>

#include "error.hpp"

namespace wbesprit::scene {

namespace {

constexpr double kMinSeparation = 1e-9;  // meters

// arctan of the coordinate ratio, restricted to (-pi/2, pi/2).
double ratio_arctan(double dy, double dx, const char* what) {
  if (std::abs(dx) < kMinSeparation) {
    fail(Errc::degenerate_geometry, std::string(what) + ": point on the array plane (dx = 0)");
  }
  return std::atan(dy / dx);
}

}  // namespace

PathGeometry los_geometry(const Position2D& p_bs, const Position2D& p_ue, double tau_b_s) {
  const Vec2 d = p_ue - p_bs;
  const double dist = d.norm();
  if (dist < kMinSeparation) {
    fail(Errc::degenerate_geometry, "los_geometry: BS and UE coincide");
  }
  if (d.x <= kMinSeparation) {
    fail(Errc::degenerate_geometry, "los_geometry: UE not in the BS front half-plane");
  }
  PathGeometry g;
  g.is_los = true;
  g.theta_tx = ratio_arctan(p_ue.y - p_bs.y, p_ue.x - p_bs.x, "los_geometry");
  g.theta_rx = ratio_arctan(p_bs.y - p_ue.y, p_ue.x - p_bs.x, "los_geometry");
  g.tau_s = dist / kSpeedOfLight + tau_b_s;
  g.travel_before_reflection_m = 0.0;
  return g;
}

Position2D scatterer_from_angles(const Position2D& p_bs, const Position2D& p_ue, double theta_tx,
                                 double theta_rx) {
  // BS locus: p_bs + t (cos tx, sin tx); UE locus: p_ue + s (-cos rx, sin rx).
  // Solving for (t, s); the determinant is -sin(tx + rx).
  const double det = -std::sin(theta_tx + theta_rx);
  if (std::abs(det) < 1e-12) {
    fail(Errc::no_intersection, "scatterer_from_angles: departure/arrival loci are parallel");
  }
  const double ct = std::cos(theta_tx), st = std::sin(theta_tx);
  const double cr = std::cos(theta_rx), sr = std::sin(theta_rx);
  const Vec2 rhs = p_ue - p_bs;
  // [ct cr; st -sr] [t; s] = rhs
  const double t = (rhs.x * (-sr) - rhs.y * cr) / det;
  const Position2D p_l{p_bs.x + t * ct, p_bs.y + t * st};
  if ((p_l - p_bs).norm() < kMinSeparation || (p_l - p_ue).norm() < kMinSeparation) {
    fail(Errc::no_intersection, "scatterer_from_angles: intersection coincides with a terminal");
  }
  return p_l;
}

PathGeometry nlos_geometry(const Position2D& p_bs, const Position2D& p_ue, const Position2D& p_l,
                           double tau_b_s, double reflection_loss_db) {
  (void)reflection_loss_db;
  if ((p_l - p_bs).norm() < kMinSeparation || (p_l - p_ue).norm() < kMinSeparation) {
    fail(Errc::degenerate_geometry, "nlos_geometry: scatterer coincides with a terminal");
  }
  PathGeometry g;
  g.is_los = false;
  g.scatterer = p_l;
  g.theta_tx = ratio_arctan(p_l.y - p_bs.y, p_l.x - p_bs.x, "nlos_geometry");
  g.theta_rx = ratio_arctan(p_l.y - p_ue.y, p_ue.x - p_l.x, "nlos_geometry");
  // Signed segment lengths along the departure / arrival directions. For a
  // scatterer in front of both arrays these equal the segment norms.
  const double d_tx = (p_l.x - p_bs.x) / std::cos(g.theta_tx);
  const double d_rx = (p_ue.x - p_l.x) / std::cos(g.theta_rx);
  const double total = d_tx + d_rx;
  if (total <= kMinSeparation) {
    fail(Errc::degenerate_geometry, "nlos_geometry: non-positive total travel length");
  }
  g.travel_before_reflection_m = d_tx;
  g.tau_s = total / kSpeedOfLight + tau_b_s;
  return g;
}

double path_gain_magnitude(const PathGeometry& geom, const SystemConfig& sys, double tau_b_s,
                           double reflection_loss_db) {
  const double length_m = (geom.tau_s - tau_b_s) * kSpeedOfLight;
  if (length_m <= 0.0) {
    fail(Errc::validation, "path_gain: non-positive travel length");
  }
  double mag = sys.wavelength_m() / (4.0 * kPi * length_m);
  if (!geom.is_los) {
    mag *= std::pow(10.0, -reflection_loss_db / 20.0);
  }
  return mag;
}

std::vector<PathGeometry> build_scene(const SceneConfig& scene, const SystemConfig& sys,
                                      GainModel model) {
  if (scene.paths_deg.size() < 2) {
    fail(Errc::validation, "scene: at least 2 paths required for localization identifiability");
  }
  const auto magnitude = [&](const PathGeometry& g) {
    if (model == GainModel::free_space) {
      return path_gain_magnitude(g, sys, scene.clock_bias_s, scene.reflection_loss_db);
    }
    return g.is_los ? 1.0 : std::pow(10.0, -scene.reflection_loss_db / 20.0);
  };

  std::vector<PathGeometry> paths;
  paths.reserve(scene.paths_deg.size());

  PathGeometry los = los_geometry(scene.bs_position, scene.ue_position, scene.clock_bias_s);
  los.gain = magnitude(los);
  paths.push_back(los);

  for (std::size_t i = 1; i < scene.paths_deg.size(); ++i) {
    const double aod = deg2rad(scene.paths_deg[i].first);
    const double aoa = deg2rad(scene.paths_deg[i].second);
    const Position2D p_l =
        scatterer_from_angles(scene.bs_position, scene.ue_position, aod, aoa);
    PathGeometry g = nlos_geometry(scene.bs_position, scene.ue_position, p_l, scene.clock_bias_s,
                                   scene.reflection_loss_db);
    g.gain = magnitude(g);
    paths.push_back(g);
  }
  return paths;
}

}  // namespace wbesprit::scene
