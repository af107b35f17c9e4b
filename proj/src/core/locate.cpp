#include "locate.hpp"

#include <cmath>

#include "error.hpp"

namespace wbesprit::locate {

DirectionPair direction_vectors(double theta_tx, double theta_rx) {
  DirectionPair d;
  d.f_tx = Vector2d(std::cos(theta_tx), std::sin(theta_tx));
  d.f_rx = Vector2d(std::cos(theta_rx), -std::sin(theta_rx));
  return d;
}

LinearSystem build_system(const std::vector<PathEstimate>& paths, const Position2D& p_bs,
                          FlConvention convention) {
  const auto num_paths = static_cast<Eigen::Index>(paths.size());
  if (num_paths < 1) {
    fail(Errc::validation, "build_system: no paths");
  }
  LinearSystem sys;
  sys.b = MatrixXd::Zero(2 * num_paths, num_paths + 2);
  sys.z = VectorXd::Zero(2 * num_paths);

  for (Eigen::Index l = 0; l < num_paths; ++l) {
    const auto& p = paths[static_cast<std::size_t>(l)];
    const DirectionPair dir = direction_vectors(p.theta_tx, p.theta_rx);
    sys.b.block<2, 2>(2 * l, 0) = Eigen::Matrix2d::Identity();
    sys.b.block<2, 1>(2 * l, 2) = kSpeedOfLight * dir.f_rx;
    if (l >= 1) {
      const Vector2d f_l = convention == FlConvention::rx_minus_tx
                               ? Vector2d(dir.f_rx - dir.f_tx)
                               : Vector2d(-(dir.f_rx + dir.f_tx));
      sys.b.block<2, 1>(2 * l, 2 + l) = f_l;
    }
    sys.z.segment<2>(2 * l) =
        Vector2d(p_bs.x, p_bs.y) + kSpeedOfLight * p.tau_s * dir.f_rx;
  }
  return sys;
}

LocalizationSolution solve_position(const LinearSystem& sys, int num_paths) {
  if (num_paths < 2) {
    fail(Errc::underdetermined, "solve_position: localization needs at least 2 paths");
  }
  if (sys.b.rows() != 2 * num_paths || sys.b.cols() != num_paths + 2) {
    fail(Errc::validation, "solve_position: system shape mismatch");
  }

  // Solve for [x, y, c*tau_b, d_2..d_L] so every unknown is in meters.
  MatrixXd scaled = sys.b;
  scaled.col(2) /= kSpeedOfLight;
  Eigen::JacobiSVD<MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  if (svd.rank() < scaled.cols()) {
    fail(Errc::ill_conditioned, "solve_position: numerically rank-deficient system");
  }
  const VectorXd v = svd.solve(sys.z);

  LocalizationSolution sol;
  sol.p_ue = Position2D{v(0), v(1)};
  sol.clock_bias_s = v(2) / kSpeedOfLight;
  for (Eigen::Index l = 3; l < v.size(); ++l) {
    sol.d_m.push_back(v(l));
    sol.negative_distance = sol.negative_distance || v(l) < 0.0;
  }
  sol.residual_norm = (scaled * v - sys.z).norm();
  return sol;
}

LocalizationSolution locate_ue(const std::vector<PathEstimate>& paths, const Position2D& p_bs,
                               FlConvention convention) {
  const LinearSystem sys = build_system(paths, p_bs, convention);
  return solve_position(sys, static_cast<int>(paths.size()));
}

}  // namespace wbesprit::locate
