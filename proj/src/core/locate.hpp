#pragma once

#include <Eigen/Dense>
#include <vector>

#include "types.hpp"

namespace wbesprit::locate {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

struct PathEstimate {
  double theta_tx = 0.0;
  double theta_rx = 0.0;
  double tau_s = 0.0;
};

struct LocalizationSolution {
  Position2D p_ue;
  double clock_bias_s = 0.0;
  std::vector<double> d_m;  // pre-reflection distances, paths 2..L
  double residual_norm = 0.0;
  // A negative recovered pre-reflection distance flags a bounce point behind
  // the transmit array plane (virtual anchor); reported, not an error.
  bool negative_distance = false;
};

// Sign convention of the pre-reflection-distance coefficient in the stacked
// system; resolved by the forward self-consistency oracle (exactly one
// convention satisfies B v = z on generated scenes).
enum class FlConvention {
  rx_minus_tx,      // f_l = f_rx - f_tx
  neg_rx_plus_tx,   // f_l = -(f_rx + f_tx)
};

inline constexpr FlConvention kDefaultFlConvention = FlConvention::rx_minus_tx;

struct DirectionPair {
  Vector2d f_tx;
  Vector2d f_rx;
};

// f_tx = [cos, sin], f_rx = [cos, -sin] of the respective angles.
DirectionPair direction_vectors(double theta_tx, double theta_rx);

struct LinearSystem {
  MatrixXd b;  // 2L x (L+2)
  VectorXd z;  // 2L
};

// Stacked localization system over [p_ue, tau_b, d_2..d_L]; path 0 is
// treated as LOS.
LinearSystem build_system(const std::vector<PathEstimate>& paths, const Position2D& p_bs,
                          FlConvention convention = kDefaultFlConvention);

// Minimum-norm least squares solve; requires L >= 2. The clock-bias column is
// rescaled internally so all unknowns are solved in meters.
LocalizationSolution solve_position(const LinearSystem& sys, int num_paths);

LocalizationSolution locate_ue(const std::vector<PathEstimate>& paths, const Position2D& p_bs,
                               FlConvention convention = kDefaultFlConvention);

}  // namespace wbesprit::locate
