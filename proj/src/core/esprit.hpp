#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "channel.hpp"
#include "types.hpp"

namespace wbesprit::esprit {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Subarray sizes per dimension for the multilevel (Hankel) rearrangement of a
// single snapshot; shift counts are q_d = M_d - p_d + 1.
struct SmoothingPlan {
  std::vector<int> subarray;

  std::vector<int> shifts(const std::vector<int>& dims) const;
  void validate(const std::vector<int>& dims, int num_paths) const;
};

// Default plan for an (M_tx, M_rx, K) tensor: ceil((M+1)/2) on the antenna
// dimensions, 2 on the subcarrier dimension.
SmoothingPlan default_plan_3d(int m_tx, int m_rx, int num_subcarriers);

// Multilevel Hankel rearrangement of an N-D single snapshot into a
// (prod p_d) x (prod q_d) matrix; entry (i, j) is the tensor entry at the
// element-wise sum of the i-th subarray offset and the j-th shift offset,
// both flattened in row-major dimension order.
MatrixXcd smooth(const std::vector<int>& dims, const cplx* data, const SmoothingPlan& plan);
MatrixXcd smooth(const ChannelTensor& t, const SmoothingPlan& plan);

// First l left singular vectors and all singular values (descending).
struct Subspace {
  MatrixXcd basis;
  VectorXd singular_values;
};
Subspace signal_subspace(const MatrixXcd& m, int l);

// Shift-invariance solution for dimension `dim` of the subarray index grid:
// least squares Psi with (J_{d,1} U) Psi = (J_{d,2} U).
MatrixXcd solve_shift_invariance(const MatrixXcd& basis, int dim, const SmoothingPlan& plan);

// Joint diagonalization of the per-dimension shift-invariance matrices via
// the shared eigenvectors of a random convex combination; rows are paths,
// columns are dimensions. Row order is unspecified here (callers sort by
// energy).
MatrixXcd joint_pair(const std::vector<MatrixXcd>& psis, std::uint64_t seed);

// Per-path modes for one dimension set, rows sorted by descending energy.
struct ModeSet {
  MatrixXcd modes;              // L x D
  std::vector<double> energy;   // descending
};

// 2D ESPRIT on a single M_tx x M_rx subcarrier slice; the matrix itself
// provides both subspaces (columns span the tx steering, rows the rx
// steering), so no smoothing is involved. Dimension order: (tx, rx).
ModeSet esprit_2d(const MatrixXcd& h_k, int num_paths, std::uint64_t seed = 0x5eed2dULL);

struct Harmonic3d {
  double phi_tx = 0.0;
  double phi_rx = 0.0;
  double tau_s = 0.0;
  cplx gain{0.0, 0.0};
};

// Standard 3D ESPRIT over the full tensor under the trilinear (narrowband)
// model: smoothing -> subspace -> three shift-invariance solves -> joint
// pairing. delta_f_hz is the effective subcarrier spacing of `t` (after any
// decimation); delays are unwrapped to [0, 1/delta_f). Output sorted by
// descending energy.
std::vector<Harmonic3d> esprit_3d(const ChannelTensor& t, int num_paths, const SmoothingPlan& plan,
                                  double delta_f_hz, std::uint64_t seed);

// Normalized angle from a dimension mode at subcarrier k (principal argument
// of the complex logarithm, rescaled by the squint factor).
double mode_to_normalized_angle(cplx mode, int k, const SystemConfig& sys);

// Physical angle theta = arcsin(phi * lambda / d).
double normalized_to_physical(double phi, const SystemConfig& sys);

}  // namespace wbesprit::esprit
