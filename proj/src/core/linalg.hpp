#pragma once

#include <Eigen/Dense>

#include "types.hpp"

namespace wbesprit::linalg {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Least squares solve of A X = B with a column-rank guard.
MatrixXcd lstsq(const MatrixXcd& a, const MatrixXcd& b, const char* what);

// Least squares solve of X A = B (X = B A^+) with a row-rank guard on A.
MatrixXcd lstsq_right(const MatrixXcd& a, const MatrixXcd& b, const char* what);

// Least squares path gains g solving (A_tx KR A_rx) g = vec_r(H) through the
// normal equations; the Khatri-Rao Gram is the Hadamard product of the
// per-side Grams. Throws ill_conditioned when the Gram is numerically
// singular (duplicate path angles).
template <typename HMatrix>
VectorXcd khatri_rao_gains(const HMatrix& h, const MatrixXcd& a_tx, const MatrixXcd& a_rx);

// Hermitian positive semi-definite solve with a relative condition guard.
VectorXcd solve_hermitian_guarded(const MatrixXcd& gram, const VectorXcd& rhs, const char* what);

}  // namespace wbesprit::linalg
