#include "linalg.hpp"

#include <string>

#include "error.hpp"

namespace wbesprit::linalg {

MatrixXcd lstsq(const MatrixXcd& a, const MatrixXcd& b, const char* what) {
  if (a.rows() != b.rows()) {
    fail(Errc::validation, std::string(what) + ": row mismatch in least squares");
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(a);
  if (cod.rank() < a.cols()) {
    fail(Errc::ill_conditioned, std::string(what) + ": rank-deficient least squares operator");
  }
  return cod.solve(b);
}

MatrixXcd lstsq_right(const MatrixXcd& a, const MatrixXcd& b, const char* what) {
  if (a.cols() != b.cols()) {
    fail(Errc::validation, std::string(what) + ": column mismatch in least squares");
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(a.adjoint());
  if (cod.rank() < a.rows()) {
    fail(Errc::ill_conditioned, std::string(what) + ": rank-deficient least squares operator");
  }
  return cod.solve(b.adjoint()).adjoint();
}

VectorXcd solve_hermitian_guarded(const MatrixXcd& gram, const VectorXcd& rhs, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
  const auto& ev = es.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  if (!(lmax > 0.0) || ev(0) < 1e-12 * lmax) {
    fail(Errc::ill_conditioned, std::string(what) + ": numerically singular Gram matrix");
  }
  return es.eigenvectors() * (es.eigenvectors().adjoint() * rhs).cwiseQuotient(ev.cast<cplx>());
}

template <typename HMatrix>
VectorXcd khatri_rao_gains(const HMatrix& h, const MatrixXcd& a_tx, const MatrixXcd& a_rx) {
  const Eigen::Index num_paths = a_tx.cols();
  if (a_rx.cols() != num_paths || h.rows() != a_tx.rows() || h.cols() != a_rx.rows()) {
    fail(Errc::validation, "khatri_rao_gains: dimension mismatch");
  }
  const MatrixXcd gram =
      (a_tx.adjoint() * a_tx).cwiseProduct((a_rx.adjoint() * a_rx).eval());
  VectorXcd rhs(num_paths);
  for (Eigen::Index l = 0; l < num_paths; ++l) {
    rhs(l) = (a_tx.col(l).adjoint() * h * a_rx.col(l).conjugate()).value();
  }
  return solve_hermitian_guarded(gram, rhs, "khatri_rao_gains");
}

template VectorXcd khatri_rao_gains<MatrixXcd>(const MatrixXcd&, const MatrixXcd&,
                                               const MatrixXcd&);
template VectorXcd khatri_rao_gains<Eigen::Map<
    const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>>(
    const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>&,
    const MatrixXcd&, const MatrixXcd&);

}  // namespace wbesprit::linalg
