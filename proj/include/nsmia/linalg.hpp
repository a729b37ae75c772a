#ifndef NSMIA_LINALG_HPP
#define NSMIA_LINALG_HPP

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <string>

#include "nsmia/channel.hpp"
#include "nsmia/errors.hpp"
#include "nsmia/types.hpp"

namespace nsmia {

template <typename Real>
struct EigenExtremes {
  Real lambda_min;
  Real lambda_max;
};

/// Dense product with an explicit shape check (Eigen only asserts in debug).
template <typename DerivedA, typename DerivedB>
auto matmul(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar, typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = a * b;
  return out;
}

/// Sum of |a_ij|^2.
template <typename Derived>
auto frobenius_norm_sq(const Eigen::MatrixBase<Derived>& a) {
  return a.squaredNorm();
}

namespace detail {

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& a, const char* who) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError(std::string(who) + ": matrix must be square");
  if ((a - a.adjoint()).norm() > Real(1e-8) * a.norm()) {
    throw ContractError(std::string(who) + ": matrix is not Hermitian");
  }
}

}  // namespace detail

/// Extreme eigenvalues of a Hermitian matrix (Householder tridiagonalization
/// followed by implicit symmetric QR). Hermiticity is checked at 1e-8
/// relative Frobenius.
template <typename Derived>
auto hermitian_eig_extremes(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  detail::require_hermitian(a, "hermitian_eig_extremes");
  using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Plain> solver(Plain(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eig_extremes: eigensolver failed");
  const auto& ev = solver.eigenvalues();  // ascending
  return EigenExtremes<Real>{ev(0), ev(ev.size() - 1)};
}

template <typename Real>
EigenExtremes<Real> hermitian_eig_extremes(const GramMatrix<Real>& g) {
  return hermitian_eig_extremes(g.matrix());
}

/// D^{-1/2} G D^{-1/2}: unit diagonal, Hermitian, similar to D^{-1} G.
template <typename Real>
CMatrix<Real> diag_normalized(const GramMatrix<Real>& g) {
  if (!(g.min_diag() > Real(0))) throw DegenerateInputError("Gram matrix has a non-positive diagonal entry");
  const RVector<Real> s = g.diag().cwiseSqrt().cwiseInverse();
  CMatrix<Real> out = s.asDiagonal() * g.matrix() * s.asDiagonal();
  out.template triangularView<Eigen::StrictlyLower>() = out.adjoint().eval();
  out.diagonal().setOnes();
  return out;
}

/// rho(I - D^{-1} G). The iteration matrix is not Hermitian, but it is similar
/// to I - D^{-1/2} G D^{-1/2}, so the radius is max |1 - mu| over the real
/// eigenvalues mu of the normalized Gram matrix.
template <typename Real>
Real iteration_spectral_radius(const GramMatrix<Real>& g) {
  const CMatrix<Real> s = diag_normalized(g);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("iteration_spectral_radius: eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return std::max(std::abs(Real(1) - ev(0)), std::abs(Real(1) - ev(ev.size() - 1)));
}

/// G^{-1} through a Cholesky factorization.
template <typename Real>
CMatrix<Real> exact_inverse(const GramMatrix<Real>& g) {
  Eigen::LLT<CMatrix<Real>> llt(g.matrix());
  if (llt.info() != Eigen::Success) throw SingularityError("exact_inverse: matrix is not positive definite");
  CMatrix<Real> inv = llt.solve(CMatrix<Real>::Identity(g.dim(), g.dim()));
  return inv;
}

}  // namespace nsmia

#endif  // NSMIA_LINALG_HPP
