#pragma once

#include <vector>

#include "types.hpp"

namespace wbesprit::scene {

// Geometry of the direct BS->UE path. Angles follow the ratio-arctangent
// convention restricted to (-pi/2, pi/2); the UE must lie in the front
// half-plane of the BS array (x_ue > x_bs).
PathGeometry los_geometry(const Position2D& p_bs, const Position2D& p_ue, double tau_b_s);

// Intersection of the BS departure locus and the UE arrival locus for the
// given angle pair. The returned point satisfies both NLOS angle equations;
// it may lie behind the BS array plane (the arctangent ratio cannot tell the
// back ray from the front one), in which case the BS-side travel distance is
// negative. Parallel loci raise a no-intersection error.
Position2D scatterer_from_angles(const Position2D& p_bs, const Position2D& p_ue, double theta_tx,
                                 double theta_rx);

// Geometry of a single-bounce path through scatterer p_l. The stored delay
// uses the signed segment lengths so that the localization system of
// build_system() is exactly consistent; for scatterers in the front
// half-plane of both arrays this is the plain sum of segment norms.
PathGeometry nlos_geometry(const Position2D& p_bs, const Position2D& p_ue, const Position2D& p_l,
                           double tau_b_s, double reflection_loss_db);

// Free-space magnitude over the total travel length c*(tau - tau_b), reduced
// by the reflection loss for NLOS paths. The bench randomizes the phase per
// trial.
double path_gain_magnitude(const PathGeometry& geom, const SystemConfig& sys, double tau_b_s,
                           double reflection_loss_db);

// Builds the full path list from a scene description: first entry LOS
// (consistent with the BS/UE positions), remaining entries NLOS through the
// scatterer implied by each configured (AOD, AOA) pair. Gain magnitudes
// follow the chosen model; phases are zero here (the bench randomizes them
// per trial).
std::vector<PathGeometry> build_scene(const SceneConfig& scene, const SystemConfig& sys,
                                      GainModel model = GainModel::reflection_only);

}  // namespace wbesprit::scene
