#pragma once

// Dense complex linear algebra used by every other module: Hermitian
// eigendecomposition, matrix exponentials, PSD square roots, fidelity,
// trace distance and the partial-transpose negativity diagnostic.
//
// Matrices are small (dimension up to a few hundred), so everything is dense.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#ifndef LAPACK_COMPLEX_CPP
#define LAPACK_COMPLEX_CPP
#endif
#include <lapacke.h>

#include "dephasim/errors.hpp"

namespace dephasim {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr complex I_unit{0.0, 1.0};

/// Default numerical tolerances. All operations accept an override.
struct LinalgTolerances {
  double hermitian = 1e-9;  ///< relative ||M - M^dag||_F bound for Hermitian inputs
  double psd_clamp = 1e-10; ///< eigenvalues in [-psd_clamp, 0) are treated as zero
  double trace = 1e-8;      ///< |Tr rho - 1| bound for density matrices
};

struct HermitianEigen {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns
};

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
  }
}

}  // namespace detail

inline double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

/// ||M - M^dag||_F.
inline double hermiticity_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).norm();
}

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol = LinalgTolerances{}.hermitian) {
  return m.rows() == m.cols() &&
         hermiticity_residual(m) <= rel_tol * std::max(1.0, m.norm());
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

/// min over phi of ||a - e^{i phi} b||_F.
inline double phase_aligned_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const complex overlap = (b.adjoint() * a).trace();
  const complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : complex{1.0, 0.0};
  return (a - phase * b).norm();
}

/// Induced 1-norm (maximum absolute column sum).
inline double one_norm(const ComplexMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

inline HermitianEigen hermitian_eig(const ComplexMatrix& m, const LinalgTolerances& tol = {}) {
  detail::require_square(m, "hermitian_eig input");
  detail::require_finite(m, "hermitian_eig input");
  if (!is_hermitian(m, tol.hermitian)) {
    throw Error(ErrorCode::NotHermitian,
                "residual " + std::to_string(hermiticity_residual(m)));
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Eigenvalues only (ascending), for the trace-norm style reductions.
inline RealVector hermitian_eigenvalues(const ComplexMatrix& m, const LinalgTolerances& tol = {}) {
  detail::require_square(m, "hermitian_eigenvalues input");
  detail::require_finite(m, "hermitian_eigenvalues input");
  if (!is_hermitian(m, tol.hermitian)) {
    throw Error(ErrorCode::NotHermitian,
                "residual " + std::to_string(hermiticity_residual(m)));
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

/// Matrix exponential by scaling and squaring with an order-18 Taylor
/// polynomial. The scaling keeps ||M / 2^s||_1 <= 0.5, where the Taylor
/// remainder is below double precision.
inline ComplexMatrix expm(const ComplexMatrix& m) {
  detail::require_square(m, "expm input");
  detail::require_finite(m, "expm input");
  constexpr int taylor_order = 18;
  const double norm = one_norm(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const ComplexMatrix a = m / std::ldexp(1.0, squarings);
  const auto n = m.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  // Horner: I + A(I + A/2 (I + A/3 (...)))
  ComplexMatrix result = id + a / static_cast<double>(taylor_order);
  for (int k = taylor_order - 1; k >= 1; --k) {
    result = id + (a * result) / static_cast<double>(k);
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  detail::require_finite(result, "expm result");
  return result;
}

/// exp(-i H t) from a precomputed eigendecomposition of Hermitian H.
inline ComplexMatrix unitary_exp(const HermitianEigen& eig, double t) {
  ComplexVector phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases[k] = std::exp(-I_unit * eig.eigenvalues[k] * t);
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

namespace detail {

inline RealVector clamp_psd(const RealVector& values, double clamp) {
  RealVector out = values;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    if (out[k] < -clamp) {
      throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(out[k]) +
                                         " below -" + std::to_string(clamp));
    }
    if (out[k] < 0.0) out[k] = 0.0;
  }
  return out;
}

}  // namespace detail

inline ComplexMatrix sqrtm_psd(const ComplexMatrix& m, const LinalgTolerances& tol = {}) {
  const HermitianEigen eig = hermitian_eig(m, tol);
  const RealVector values = detail::clamp_psd(eig.eigenvalues, tol.psd_clamp);
  return eig.eigenvectors * values.cwiseSqrt().asDiagonal() * eig.eigenvectors.adjoint();
}

/// A factor F with F F^dag = M for PSD M: columns are eigenvectors scaled by
/// sqrt(eigenvalue). Columns with zero (clamped) eigenvalue are dropped.
inline ComplexMatrix psd_factor(const ComplexMatrix& m, const LinalgTolerances& tol = {}) {
  const HermitianEigen eig = hermitian_eig(m, tol);
  const RealVector values = detail::clamp_psd(eig.eigenvalues, tol.psd_clamp);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k) rank += values[k] > 0.0 ? 1 : 0;
  ComplexMatrix factor(m.rows(), std::max<Eigen::Index>(rank, 1));
  factor.setZero();
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] > 0.0) factor.col(col++) = eig.eigenvectors.col(k) * std::sqrt(values[k]);
  }
  return factor;
}

/// Sum of singular values from LAPACK zgesvd (no singular vectors). Its
/// bidiagonal QR resolves small singular values to absolute accuracy
/// eps * ||m||, unlike sqrt(eig(m^dag m)), which is what the fidelity needs
/// near rank deficiency. Eigen 3.4's BDCSVD was observed to lose ~1e-4 on
/// some 64 x 64 overlaps, so it is not used.
inline double trace_norm(const ComplexMatrix& m) {
  detail::require_finite(m, "trace_norm input");
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  ComplexMatrix work = m;
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  std::vector<double> sigma(static_cast<std::size_t>(std::min(rows, cols)));
  std::vector<double> superb(sigma.size());
  const lapack_int info = LAPACKE_zgesvd(
      LAPACK_COL_MAJOR, 'N', 'N', rows, cols, reinterpret_cast<lapack_complex_double*>(work.data()),
      rows, sigma.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) {
    throw Error(ErrorCode::ConvergenceFailure, "zgesvd failed with info " + std::to_string(info));
  }
  double sum = 0.0;
  for (double v : sigma) sum += v;
  return sum;
}

inline void require_density(const ComplexMatrix& rho, const LinalgTolerances& tol,
                            const char* what) {
  detail::require_square(rho, what);
  detail::require_finite(rho, what);
  if (!is_hermitian(rho, tol.hermitian)) {
    throw Error(ErrorCode::NotHermitian, std::string(what) + " is not Hermitian");
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " has trace " + std::to_string(tr));
  }
}

/// Uhlmann fidelity from square-root factors: with rho1 = A A^dag and
/// rho2 = B B^dag, [Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2 = ||A^dag B||_tr^2.
inline double fidelity_from_factors(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "fidelity factors act on different spaces");
  }
  const double root = trace_norm(a.adjoint() * b);
  return root * root;
}

/// F(rho1, rho2) = [Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2, in [0, 1].
inline double fidelity(const ComplexMatrix& rho1, const ComplexMatrix& rho2,
                       const LinalgTolerances& tol = {}) {
  require_density(rho1, tol, "fidelity argument rho1");
  require_density(rho2, tol, "fidelity argument rho2");
  if (rho1.rows() != rho2.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "fidelity arguments differ in dimension");
  }
  return fidelity_from_factors(psd_factor(rho1, tol), psd_factor(rho2, tol));
}

/// (1/2) ||rho1 - rho2||_1 over the eigenvalues of the Hermitian difference.
inline double trace_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2,
                             const LinalgTolerances& tol = {}) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "trace_distance arguments differ in dimension");
  }
  const RealVector values = hermitian_eigenvalues(rho1 - rho2, tol);
  return 0.5 * values.cwiseAbs().sum();
}

/// Partial transpose over the first (system) tensor factor of a
/// (dim_s * dim_e)-square operator ordered as |i> (x) |a> -> i * dim_e + a.
inline ComplexMatrix partial_transpose_system(const ComplexMatrix& sigma, Eigen::Index dim_s,
                                              Eigen::Index dim_e) {
  if (dim_s <= 0 || dim_e <= 0 || sigma.rows() != dim_s * dim_e ||
      sigma.cols() != dim_s * dim_e) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator of size " + std::to_string(sigma.rows()) + " is not " +
                    std::to_string(dim_s) + "x" + std::to_string(dim_e));
  }
  ComplexMatrix out(sigma.rows(), sigma.cols());
  for (Eigen::Index i = 0; i < dim_s; ++i) {
    for (Eigen::Index j = 0; j < dim_s; ++j) {
      out.block(j * dim_e, i * dim_e, dim_e, dim_e) = sigma.block(i * dim_e, j * dim_e, dim_e, dim_e);
    }
  }
  return out;
}

/// Sum of |negative eigenvalues| of the system partial transpose.
inline double negativity(const ComplexMatrix& sigma, Eigen::Index dim_s, Eigen::Index dim_e,
                         const LinalgTolerances& tol = {}) {
  const ComplexMatrix pt = partial_transpose_system(sigma, dim_s, dim_e);
  const RealVector values = hermitian_eigenvalues(pt, tol);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] < 0.0) sum -= values[k];
  }
  return sum;
}

}  // namespace dephasim
