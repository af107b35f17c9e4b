#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "scene.hpp"

using namespace wbesprit;
using scene::los_geometry;
using scene::nlos_geometry;
using scene::path_gain_magnitude;
using scene::scatterer_from_angles;

namespace {
const Position2D kBs{0.0, 40.0};
const Position2D kUe{40.0, 0.0};
}  // namespace

TEST_CASE("los geometry of the reference scene") {
  const PathGeometry g = los_geometry(kBs, kUe, 0.0);
  CHECK(g.is_los);
  CHECK(g.theta_tx == doctest::Approx(deg2rad(-45.0)).epsilon(1e-12));
  CHECK(g.theta_rx == doctest::Approx(deg2rad(45.0)).epsilon(1e-12));
  const double dist = std::hypot(40.0, 40.0);
  CHECK(g.tau_s == dist / kSpeedOfLight);  // exact, no bias
  CHECK(g.tau_s * 1e9 == doctest::Approx(188.6926).epsilon(1e-4));
}

TEST_CASE("los geometry on the x axis") {
  const PathGeometry g = los_geometry({0.0, 0.0}, {1.0, 0.0}, 0.0);
  CHECK(g.theta_tx == 0.0);
  CHECK(g.theta_rx == 0.0);
  CHECK(g.tau_s == 1.0 / kSpeedOfLight);
}

TEST_CASE("los geometry with clock bias adds exactly") {
  const double bias = 3.2e-7;
  const PathGeometry g = los_geometry(kBs, kUe, bias);
  CHECK(g.tau_s == std::hypot(40.0, 40.0) / kSpeedOfLight + bias);
}

TEST_CASE("los geometry rejects coincident terminals") {
  CHECK_THROWS_AS(los_geometry(kBs, kBs, 0.0), Error);
}

TEST_CASE("los geometry rejects a UE behind the BS array") {
  CHECK_THROWS_AS(los_geometry({0.0, 0.0}, {-1.0, 0.5}, 0.0), Error);
}

TEST_CASE("scatterer from symmetric angles sits at the apex") {
  const Position2D p = scatterer_from_angles({0.0, 0.0}, {2.0, 0.0}, deg2rad(45.0), deg2rad(45.0));
  CHECK(p.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scatterer for the second reference path satisfies both angle equations") {
  const double aod = deg2rad(-54.0), aoa = deg2rad(-62.0);
  const Position2D p = scatterer_from_angles(kBs, kUe, aod, aoa);
  const double tx_check = std::atan((p.y - kBs.y) / (p.x - kBs.x));
  const double rx_check = std::atan((p.y - kUe.y) / (kUe.x - p.x));
  CHECK(tx_check == doctest::Approx(aod).epsilon(1e-12));
  CHECK(rx_check == doctest::Approx(aoa).epsilon(1e-12));
  CHECK(p.x > kBs.x);
  CHECK(p.x < kUe.x);
}

TEST_CASE("parallel angle loci raise no-intersection") {
  CHECK_THROWS_AS(scatterer_from_angles(kBs, kUe, deg2rad(30.0), deg2rad(-30.0)), Error);
}

TEST_CASE("nlos geometry of a symmetric vee") {
  const PathGeometry g = nlos_geometry({0.0, 0.0}, {2.0, 0.0}, {1.0, 1.0}, 0.0, 3.0);
  CHECK_FALSE(g.is_los);
  CHECK(g.tau_s == doctest::Approx(2.0 * std::sqrt(2.0) / kSpeedOfLight).epsilon(1e-14));
  CHECK(g.travel_before_reflection_m == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("nlos delay equals the segment-length sum for a front scatterer") {
  const Position2D p = scatterer_from_angles(kBs, kUe, deg2rad(-54.0), deg2rad(-62.0));
  const PathGeometry g = nlos_geometry(kBs, kUe, p, 0.0, 3.0);
  const double seg = (p - kBs).norm() + (p - kUe).norm();
  CHECK(g.tau_s == doctest::Approx(seg / kSpeedOfLight).epsilon(1e-13));
  CHECK(g.travel_before_reflection_m == doctest::Approx((p - kBs).norm()).epsilon(1e-13));
}

TEST_CASE("nlos geometry rejects a scatterer on a terminal") {
  CHECK_THROWS_AS(nlos_geometry(kBs, kUe, kBs, 0.0, 3.0), Error);
}

TEST_CASE("free-space gain is one at the normalization distance") {
  SystemConfig sys;
  const double r0 = sys.wavelength_m() / (4.0 * kPi);
  const PathGeometry g = los_geometry({0.0, 0.0}, {r0, 0.0}, 0.0);
  CHECK(path_gain_magnitude(g, sys, 0.0, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gain of the reference LOS path") {
  SystemConfig sys;
  const PathGeometry g = los_geometry(kBs, kUe, 0.0);
  const double expected = sys.wavelength_m() / (4.0 * kPi * std::hypot(40.0, 40.0));
  const double got = path_gain_magnitude(g, sys, 0.0, 3.0);
  CHECK(got == doctest::Approx(expected).epsilon(1e-14));
  CHECK(got == doctest::Approx(1.507e-5).epsilon(1e-3));
}

TEST_CASE("reflection loss is exactly 3 dB at equal length") {
  SystemConfig sys;
  const PathGeometry los = los_geometry({0.0, 0.0}, {2.0 * std::sqrt(2.0), 0.0}, 0.0);
  const PathGeometry nlos = nlos_geometry({0.0, 0.0}, {2.0, 0.0}, {1.0, 1.0}, 0.0, 3.0);
  REQUIRE(los.tau_s == doctest::Approx(nlos.tau_s).epsilon(1e-14));
  const double ratio =
      path_gain_magnitude(nlos, sys, 0.0, 3.0) / path_gain_magnitude(los, sys, 0.0, 3.0);
  CHECK(ratio == doctest::Approx(std::pow(10.0, -3.0 / 20.0)).epsilon(1e-13));
}

TEST_CASE("gains decrease strictly with path length") {
  SystemConfig sys;
  double prev = 1e300;
  for (double x = 5.0; x < 200.0; x += 7.3) {
    const PathGeometry g = los_geometry({0.0, 0.0}, {x, 0.0}, 0.0);
    const double mag = path_gain_magnitude(g, sys, 0.0, 3.0);
    CHECK(mag < prev);
    prev = mag;
  }
}

TEST_CASE("angle round trip through scatterer placement") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(2.0, 38.0);
  std::uniform_real_distribution<double> uy(-60.0, 90.0);
  for (int i = 0; i < 1000; ++i) {
    // A scatterer strictly between the arrays is front-feasible for both.
    const Position2D p_l{ux(rng), uy(rng)};
    PathGeometry ref;
    try {
      ref = nlos_geometry(kBs, kUe, p_l, 0.0, 3.0);
    } catch (const Error&) {
      continue;  // degenerate draw (scatterer on an array plane)
    }
    const Position2D back = scatterer_from_angles(kBs, kUe, ref.theta_tx, ref.theta_rx);
    const PathGeometry again = nlos_geometry(kBs, kUe, back, 0.0, 3.0);
    CHECK(std::abs(again.theta_tx - ref.theta_tx) < 1e-10);
    CHECK(std::abs(again.theta_rx - ref.theta_rx) < 1e-10);
  }
}

TEST_CASE("reference scene builds all three paths") {
  SystemConfig sys;
  SceneConfig sc;
  sc.bs_position = kBs;
  sc.ue_position = kUe;
  sc.paths_deg = {{-45.0, 45.0}, {-54.0, -62.0}, {65.0, 40.0}};
  const auto paths = scene::build_scene(sc, sys);
  REQUIRE(paths.size() == 3);

  CHECK(paths[0].is_los);
  CHECK(paths[0].theta_tx == doctest::Approx(deg2rad(-45.0)).epsilon(1e-12));
  CHECK(paths[1].theta_tx == doctest::Approx(deg2rad(-54.0)).epsilon(1e-12));
  CHECK(paths[1].theta_rx == doctest::Approx(deg2rad(-62.0)).epsilon(1e-12));
  CHECK(paths[2].theta_tx == doctest::Approx(deg2rad(65.0)).epsilon(1e-12));
  CHECK(paths[2].theta_rx == doctest::Approx(deg2rad(40.0)).epsilon(1e-12));

  // The third angle pair has no front-half-plane intersection: the consistent
  // anchor sits behind the BS (signed pre-reflection distance), and the
  // stored delay keeps the localization identity exact.
  CHECK(paths[2].travel_before_reflection_m < 0.0);
  const Position2D p3 = *paths[2].scatterer;
  const double d_rx = (kUe - p3).norm();
  CHECK(paths[2].tau_s ==
        doctest::Approx((paths[2].travel_before_reflection_m + d_rx) / kSpeedOfLight)
            .epsilon(1e-12));

  // Delays distinct and inside the unambiguous window of the default spacing.
  // The signed third path comes out shorter than the direct one.
  CHECK(paths[2].tau_s < paths[0].tau_s);
  CHECK(paths[0].tau_s < paths[1].tau_s);
  // The direct path keeps the largest gain, so the LOS designate is stable.
  CHECK(std::abs(paths[0].gain) > std::abs(paths[1].gain));
  CHECK(std::abs(paths[0].gain) > std::abs(paths[2].gain));
  for (const auto& p : paths) {
    CHECK(p.tau_s > 0.0);
    CHECK(p.tau_s < 0.5 / sys.delta_f_hz);
  }
}

TEST_CASE("scene requires at least two paths") {
  SystemConfig sys;
  SceneConfig sc;
  sc.paths_deg = {{-45.0, 45.0}};
  CHECK_THROWS_AS(scene::build_scene(sc, sys), Error);
}
