#ifndef NSMIA_TYPES_HPP
#define NSMIA_TYPES_HPP

#include <Eigen/Dense>
#include <complex>

namespace nsmia {

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using CMatrixXd = CMatrix<double>;
using CVectorXd = CVector<double>;

}  // namespace nsmia

#endif  // NSMIA_TYPES_HPP
