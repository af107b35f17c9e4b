#include "esprit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "error.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace wbesprit::esprit {

namespace {

long long product(const std::vector<int>& v) {
  long long p = 1;
  for (int x : v) p *= x;
  return p;
}

// Flattened offsets of a row-major grid walk over `extents`, where stepping
// dimension d by one moves `strides[d]` in the underlying buffer.
std::vector<long long> grid_offsets(const std::vector<int>& extents,
                                    const std::vector<long long>& strides) {
  const long long n = product(extents);
  std::vector<long long> out(static_cast<std::size_t>(n));
  std::vector<int> idx(extents.size(), 0);
  for (long long i = 0; i < n; ++i) {
    long long off = 0;
    for (std::size_t d = 0; d < extents.size(); ++d) off += idx[d] * strides[d];
    out[static_cast<std::size_t>(i)] = off;
    for (int d = static_cast<int>(extents.size()) - 1; d >= 0; --d) {
      if (++idx[d] < extents[d]) break;
      idx[d] = 0;
    }
  }
  return out;
}

std::vector<long long> row_major_strides(const std::vector<int>& dims) {
  std::vector<long long> s(dims.size(), 1);
  for (int d = static_cast<int>(dims.size()) - 2; d >= 0; --d) {
    s[d] = s[d + 1] * dims[d + 1];
  }
  return s;
}

struct SmoothedView {
  const cplx* data = nullptr;
  std::vector<long long> row_offsets;
  std::vector<long long> col_offsets;

  Eigen::Index rows() const { return static_cast<Eigen::Index>(row_offsets.size()); }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(col_offsets.size()); }

  void fill_block(Eigen::Index j0, Eigen::Index n, MatrixXcd& out) const {
    out.resize(rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const long long c = col_offsets[static_cast<std::size_t>(j0 + j)];
      for (Eigen::Index i = 0; i < rows(); ++i) {
        out(i, j) = data[row_offsets[static_cast<std::size_t>(i)] + c];
      }
    }
  }
};

SmoothedView make_view(const std::vector<int>& dims, const std::vector<long long>& strides,
                       const cplx* data, const SmoothingPlan& plan) {
  SmoothedView v;
  v.data = data;
  v.row_offsets = grid_offsets(plan.subarray, strides);
  v.col_offsets = grid_offsets(plan.shifts(dims), strides);
  return v;
}

// Randomized range finder subspace for wide smoothed matrices; exact for
// exactly rank-deficient (noiseless) inputs.
Subspace subspace_randomized(const SmoothedView& view, int l, int oversample, int power_iters,
                             std::uint64_t seed) {
  const Eigen::Index rows = view.rows(), cols = view.cols();
  const Eigen::Index r = std::min<Eigen::Index>(l + oversample, std::min(rows, cols));
  auto rng = make_rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  MatrixXcd omega(cols, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) omega(i, j) = cplx{n01(rng), n01(rng)};
  }

  constexpr Eigen::Index kBlock = 1024;
  MatrixXcd block;
  MatrixXcd f = MatrixXcd::Zero(rows, r);
  for (Eigen::Index j0 = 0; j0 < cols; j0 += kBlock) {
    const Eigen::Index n = std::min(kBlock, cols - j0);
    view.fill_block(j0, n, block);
    f.noalias() += block * omega.middleRows(j0, n);
  }
  Eigen::HouseholderQR<MatrixXcd> qr(f);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(rows, r);

  MatrixXcd z(cols, r);
  for (int it = 0; it < power_iters; ++it) {
    for (Eigen::Index j0 = 0; j0 < cols; j0 += kBlock) {
      const Eigen::Index n = std::min(kBlock, cols - j0);
      view.fill_block(j0, n, block);
      z.middleRows(j0, n).noalias() = block.adjoint() * q;
    }
    Eigen::HouseholderQR<MatrixXcd> qrz(z);
    MatrixXcd zq = qrz.householderQ() * MatrixXcd::Identity(cols, r);
    f.setZero();
    for (Eigen::Index j0 = 0; j0 < cols; j0 += kBlock) {
      const Eigen::Index n = std::min(kBlock, cols - j0);
      view.fill_block(j0, n, block);
      f.noalias() += block * zq.middleRows(j0, n);
    }
    qr.compute(f);
    q = qr.householderQ() * MatrixXcd::Identity(rows, r);
  }

  MatrixXcd b(r, cols);
  for (Eigen::Index j0 = 0; j0 < cols; j0 += kBlock) {
    const Eigen::Index n = std::min(kBlock, cols - j0);
    view.fill_block(j0, n, block);
    b.middleCols(j0, n).noalias() = q.adjoint() * block;
  }
  Eigen::JacobiSVD<MatrixXcd> svd(b, Eigen::ComputeThinU);
  Subspace s;
  s.basis = q * svd.matrixU().leftCols(l);
  s.singular_values = svd.singularValues().head(l);
  return s;
}

Subspace subspace_of_view(const SmoothedView& view, int l, std::uint64_t seed) {
  const Eigen::Index rows = view.rows(), cols = view.cols();
  if (l > std::min(rows, cols)) {
    fail(Errc::validation, "signal subspace: requested order exceeds matrix bounds");
  }
  const bool small = rows * cols <= (1 << 16) || std::min(rows, cols) <= 2 * (l + 5);
  if (small) {
    MatrixXcd y;
    // Materialize in one block.
    view.fill_block(0, cols, y);
    Subspace s = signal_subspace(y, l);
    s.singular_values.conservativeResize(l);
    return s;
  }
  return subspace_randomized(view, l, /*oversample=*/5, /*power_iters=*/1, seed);
}

double principal_arg(cplx a) {
  if (a == cplx{0.0, 0.0}) {
    fail(Errc::validation, "mode argument of zero");
  }
  return std::arg(a);
}

}  // namespace

std::vector<int> SmoothingPlan::shifts(const std::vector<int>& dims) const {
  std::vector<int> q(dims.size());
  for (std::size_t d = 0; d < dims.size(); ++d) q[d] = dims[d] - subarray[d] + 1;
  return q;
}

void SmoothingPlan::validate(const std::vector<int>& dims, int num_paths) const {
  if (subarray.size() != dims.size() || dims.empty()) {
    fail(Errc::validation, "smoothing plan: dimension count mismatch");
  }
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (subarray[d] < 1 || subarray[d] > dims[d]) {
      fail(Errc::validation, "smoothing plan: subarray size outside [1, M_d]");
    }
  }
  if (product(subarray) <= num_paths) {
    fail(Errc::validation, "smoothing plan: subarray product must exceed the model order");
  }
  if (product(shifts(dims)) < num_paths) {
    fail(Errc::validation, "smoothing plan: shift product below the model order");
  }
}

SmoothingPlan default_plan_3d(int m_tx, int m_rx, int num_subcarriers) {
  SmoothingPlan p;
  p.subarray = {(m_tx + 2) / 2, (m_rx + 2) / 2, std::min(2, num_subcarriers)};
  return p;
}

MatrixXcd smooth(const std::vector<int>& dims, const cplx* data, const SmoothingPlan& plan) {
  plan.validate(dims, 0);
  const SmoothedView v = make_view(dims, row_major_strides(dims), data, plan);
  if (v.rows() * v.cols() > (1LL << 24)) {
    fail(Errc::validation, "smooth: smoothed matrix too large to materialize");
  }
  MatrixXcd y;
  v.fill_block(0, v.cols(), y);
  return y;
}

MatrixXcd smooth(const ChannelTensor& t, const SmoothingPlan& plan) {
  const std::vector<int> dims = {t.m_tx(), t.m_rx(), t.num_subcarriers()};
  plan.validate(dims, 0);
  const std::vector<long long> strides = {t.m_rx(), 1,
                                          static_cast<long long>(t.m_tx()) * t.m_rx()};
  const SmoothedView v = make_view(dims, strides, t.data(), plan);
  if (v.rows() * v.cols() > (1LL << 24)) {
    fail(Errc::validation, "smooth: smoothed matrix too large to materialize");
  }
  MatrixXcd y;
  v.fill_block(0, v.cols(), y);
  return y;
}

Subspace signal_subspace(const MatrixXcd& m, int l) {
  if (l < 1 || l > std::min(m.rows(), m.cols())) {
    fail(Errc::validation, "signal_subspace: order outside [1, min(rows, cols)]");
  }
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU);
  Subspace s;
  s.basis = svd.matrixU().leftCols(l);
  s.singular_values = svd.singularValues();
  return s;
}

MatrixXcd solve_shift_invariance(const MatrixXcd& basis, int dim, const SmoothingPlan& plan) {
  const int num_dims = static_cast<int>(plan.subarray.size());
  if (dim < 0 || dim >= num_dims) {
    fail(Errc::validation, "solve_shift_invariance: bad dimension index");
  }
  if (basis.rows() != product(plan.subarray)) {
    fail(Errc::validation, "solve_shift_invariance: basis rows do not match the subarray grid");
  }
  const int p_d = plan.subarray[dim];
  if (p_d < 2) {
    fail(Errc::validation, "solve_shift_invariance: dimension has no shift pair (p_d < 2)");
  }
  // Row-major stride of dimension `dim` within the subarray grid.
  long long stride = 1;
  for (int d = dim + 1; d < num_dims; ++d) stride *= plan.subarray[d];

  const Eigen::Index sel_rows = basis.rows() / p_d * (p_d - 1);
  if (sel_rows < basis.cols()) {
    fail(Errc::underdetermined, "solve_shift_invariance: fewer selected rows than paths");
  }
  MatrixXcd a(sel_rows, basis.cols()), b(sel_rows, basis.cols());
  Eigen::Index r = 0;
  std::vector<int> idx(num_dims, 0);
  const Eigen::Index total = basis.rows();
  for (Eigen::Index i = 0; i < total; ++i) {
    if (idx[dim] < p_d - 1) {
      a.row(r) = basis.row(i);
      b.row(r) = basis.row(i + stride);
      ++r;
    }
    for (int d = num_dims - 1; d >= 0; --d) {
      if (++idx[d] < plan.subarray[d]) break;
      idx[d] = 0;
    }
  }
  return linalg::lstsq(a, b, "solve_shift_invariance");
}

MatrixXcd joint_pair(const std::vector<MatrixXcd>& psis, std::uint64_t seed) {
  if (psis.empty()) {
    fail(Errc::validation, "joint_pair: no dimensions");
  }
  const Eigen::Index num_paths = psis[0].rows();
  const int num_dims = static_cast<int>(psis.size());
  for (const auto& p : psis) {
    if (p.rows() != num_paths || p.cols() != num_paths) {
      fail(Errc::validation, "joint_pair: inconsistent shift-invariance matrices");
    }
  }
  MatrixXcd out(num_paths, num_dims);
  if (num_paths == 1) {
    for (int d = 0; d < num_dims; ++d) out(0, d) = psis[d](0, 0);
    return out;
  }
  if (num_dims == 1) {
    Eigen::ComplexEigenSolver<MatrixXcd> ces(psis[0], /*computeEigenvectors=*/false);
    out.col(0) = ces.eigenvalues();
    return out;
  }

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  constexpr int kMaxAttempts = 8;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<double> beta(num_dims);
    double sum = 0.0;
    for (double& b : beta) {
      b = u(rng);
      sum += b;
    }
    MatrixXcd comb = MatrixXcd::Zero(num_paths, num_paths);
    for (int d = 0; d < num_dims; ++d) comb += (beta[d] / sum) * psis[d];

    Eigen::ComplexEigenSolver<MatrixXcd> ces(comb);
    if (ces.info() != Eigen::Success) continue;
    const VectorXcd& lam = ces.eigenvalues();
    double scale = lam.cwiseAbs().maxCoeff() + 1e-300;
    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < num_paths; ++i) {
      for (Eigen::Index j = i + 1; j < num_paths; ++j) {
        min_gap = std::min(min_gap, std::abs(lam(i) - lam(j)));
      }
    }
    if (min_gap < 1e-6 * scale) continue;

    const MatrixXcd& vecs = ces.eigenvectors();
    Eigen::JacobiSVD<MatrixXcd> cond(vecs);
    if (cond.singularValues()(num_paths - 1) < 1e-10 * cond.singularValues()(0)) continue;

    Eigen::PartialPivLU<MatrixXcd> lu(vecs);
    for (int d = 0; d < num_dims; ++d) {
      const MatrixXcd lambda = lu.solve(psis[d] * vecs);
      out.col(d) = lambda.diagonal();
    }
    return out;
  }
  fail(Errc::ill_conditioned,
       "joint_pair: clustered eigenvalues in every random combination (coincident paths?)");
}

namespace {

// Unit-modulus steering vector rebuilt from a mode's argument only.
VectorXcd steering_from_mode(cplx mode, int length) {
  const double w = std::arg(mode);
  VectorXcd v(length);
  for (int m = 0; m < length; ++m) v(m) = std::polar(1.0, w * m);
  return v;
}

void sort_rows_by_energy(MatrixXcd& modes, std::vector<double>& energy) {
  const Eigen::Index num_paths = modes.rows();
  std::vector<int> order(static_cast<std::size_t>(num_paths));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return energy[a] > energy[b]; });
  MatrixXcd sorted(num_paths, modes.cols());
  std::vector<double> se(static_cast<std::size_t>(num_paths));
  for (Eigen::Index i = 0; i < num_paths; ++i) {
    sorted.row(i) = modes.row(order[static_cast<std::size_t>(i)]);
    se[static_cast<std::size_t>(i)] = energy[order[static_cast<std::size_t>(i)]];
  }
  modes = std::move(sorted);
  energy = std::move(se);
}

}  // namespace

ModeSet esprit_2d(const MatrixXcd& h_k, int num_paths, std::uint64_t seed) {
  const Eigen::Index m = h_k.rows(), n = h_k.cols();
  if (num_paths < 1) {
    fail(Errc::validation, "esprit_2d: model order must be positive");
  }
  if (num_paths > std::min(m, n) - 1) {
    fail(Errc::validation, "esprit_2d: model order exceeds min(M_tx, M_rx) - 1");
  }

  // Left singular subspace from the Gram matrix (same span, cheaper than a
  // full SVD at these sizes).
  const MatrixXcd gram = h_k * h_k.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
  if (es.info() != Eigen::Success) {
    fail(Errc::internal, "esprit_2d: eigendecomposition failed");
  }
  MatrixXcd u_s(m, num_paths);
  std::vector<double> svals(static_cast<std::size_t>(num_paths));
  for (int j = 0; j < num_paths; ++j) {
    u_s.col(j) = es.eigenvectors().col(m - 1 - j);
    svals[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, es.eigenvalues()(m - 1 - j)));
  }

  const MatrixXcd psi_tx =
      linalg::lstsq(u_s.topRows(m - 1), u_s.bottomRows(m - 1), "esprit_2d/tx");
  // Row-space factor: g = U_s^H H = T^-1 diag(gain) A_rx^T shares the tx
  // mixing matrix, so the column-shift pencil lives in the same eigenbasis.
  const MatrixXcd g = u_s.adjoint() * h_k;
  const MatrixXcd psi_rx =
      linalg::lstsq_right(g.leftCols(n - 1), g.rightCols(n - 1), "esprit_2d/rx");

  ModeSet ms;
  ms.modes = joint_pair({psi_tx, psi_rx}, seed);

  ms.energy.resize(static_cast<std::size_t>(num_paths));
  MatrixXcd a_tx(m, num_paths), a_rx(n, num_paths);
  for (int l = 0; l < num_paths; ++l) {
    a_tx.col(l) = steering_from_mode(ms.modes(l, 0), static_cast<int>(m));
    a_rx.col(l) = steering_from_mode(ms.modes(l, 1), static_cast<int>(n));
  }
  const VectorXcd gains = linalg::khatri_rao_gains(h_k, a_tx, a_rx);
  for (int l = 0; l < num_paths; ++l) ms.energy[static_cast<std::size_t>(l)] = std::abs(gains(l));
  sort_rows_by_energy(ms.modes, ms.energy);
  return ms;
}

std::vector<Harmonic3d> esprit_3d(const ChannelTensor& t, int num_paths, const SmoothingPlan& plan,
                                  double delta_f_hz, std::uint64_t seed) {
  const std::vector<int> dims = {t.m_tx(), t.m_rx(), t.num_subcarriers()};
  plan.validate(dims, num_paths);
  for (int d = 0; d < 3; ++d) {
    if (plan.subarray[d] < 2) {
      fail(Errc::validation, "esprit_3d: every dimension needs a shift pair (p_d >= 2)");
    }
  }
  const std::vector<long long> strides = {t.m_rx(), 1,
                                          static_cast<long long>(t.m_tx()) * t.m_rx()};
  const SmoothedView view = make_view(dims, strides, t.data(), plan);
  const Subspace sub = subspace_of_view(view, num_paths, mix_seed(seed, 0x3d5bULL));

  if (sub.singular_values(num_paths - 1) < 1e-12 * sub.singular_values(0)) {
    fail(Errc::ill_conditioned, "esprit_3d: signal subspace is rank deficient");
  }

  std::vector<MatrixXcd> psis;
  psis.reserve(3);
  for (int d = 0; d < 3; ++d) {
    psis.push_back(solve_shift_invariance(sub.basis, d, plan));
  }
  const MatrixXcd modes = joint_pair(psis, mix_seed(seed, 0x9a17));

  std::vector<Harmonic3d> out(static_cast<std::size_t>(num_paths));
  MatrixXcd a_tx(t.m_tx(), num_paths), a_rx(t.m_rx(), num_paths), a_k(t.num_subcarriers(),
                                                                      num_paths);
  for (int l = 0; l < num_paths; ++l) {
    Harmonic3d& h = out[static_cast<std::size_t>(l)];
    h.phi_tx = -principal_arg(modes(l, 0)) / (2.0 * kPi);
    h.phi_rx = -principal_arg(modes(l, 1)) / (2.0 * kPi);
    double tau = -principal_arg(modes(l, 2)) / (2.0 * kPi * delta_f_hz);
    if (tau < 0.0) tau += 1.0 / delta_f_hz;
    h.tau_s = tau;
    a_tx.col(l) = steering_from_mode(modes(l, 0), t.m_tx());
    a_rx.col(l) = steering_from_mode(modes(l, 1), t.m_rx());
    a_k.col(l) = steering_from_mode(modes(l, 2), t.num_subcarriers());
  }

  // Least-squares path gains over the whole tensor under the trilinear model;
  // used for the energy ordering and the LOS pick.
  const MatrixXcd gram = (a_tx.adjoint() * a_tx)
                             .cwiseProduct((a_rx.adjoint() * a_rx).eval())
                             .cwiseProduct((a_k.adjoint() * a_k).eval());
  VectorXcd rhs(num_paths);
  for (int l = 0; l < num_paths; ++l) {
    cplx acc{0.0, 0.0};
    for (int k = 0; k < t.num_subcarriers(); ++k) {
      const cplx w =
          (a_tx.col(l).adjoint() * t.slice(k) * a_rx.col(l).conjugate()).value();
      acc += std::conj(a_k(k, l)) * w;
    }
    rhs(l) = acc;
  }
  const VectorXcd gains = linalg::solve_hermitian_guarded(gram, rhs, "esprit_3d/gains");
  for (int l = 0; l < num_paths; ++l) out[static_cast<std::size_t>(l)].gain = gains(l);

  std::stable_sort(out.begin(), out.end(),
                   [](const Harmonic3d& a, const Harmonic3d& b) {
                     return std::abs(a.gain) > std::abs(b.gain);
                   });
  return out;
}

double mode_to_normalized_angle(cplx mode, int k, const SystemConfig& sys) {
  return -principal_arg(mode) / (2.0 * kPi * sys.squint(k));
}

double normalized_to_physical(double phi, const SystemConfig& sys) {
  double x = phi / sys.spacing_wavelengths;
  if (std::abs(x) > 1.0 + 1e-12) {
    fail(Errc::out_of_range, "normalized_to_physical: |phi * lambda / d| exceeds 1");
  }
  x = std::clamp(x, -1.0, 1.0);
  return std::asin(x);
}

}  // namespace wbesprit::esprit
