#ifndef NSMIA_CHANNEL_HPP
#define NSMIA_CHANNEL_HPP

#include <cmath>
#include <string>
#include <utility>

#include "nsmia/errors.hpp"
#include "nsmia/rng.hpp"
#include "nsmia/types.hpp"

namespace nsmia {

/// M x K uplink channel, one column per user. Requires M >= K >= 1.
template <typename Real = double>
class ChannelMatrix {
 public:
  explicit ChannelMatrix(CMatrix<Real> h) : h_(std::move(h)) {
    if (h_.cols() < 1 || h_.rows() < h_.cols()) {
      throw DimensionError("channel matrix needs M >= K >= 1, got " + std::to_string(h_.rows()) + "x" +
                           std::to_string(h_.cols()));
    }
  }

  Index antennas() const noexcept { return h_.rows(); }
  Index users() const noexcept { return h_.cols(); }
  const CMatrix<Real>& matrix() const noexcept { return h_; }
  auto column(Index k) const { return h_.col(k); }

 private:
  CMatrix<Real> h_;
};

/// K x K Gram matrix G = D + E with the diagonal D and hollow part E cached.
/// Always exactly Hermitian: the lower triangle is the conjugate mirror of the
/// upper one and the diagonal is real.
template <typename Real = double>
class GramMatrix {
 public:
  /// Adopts an existing matrix. Rejects non-square input and anything further
  /// than 1e-8 (relative Frobenius) from Hermitian; the residual asymmetry is
  /// then removed by mirroring the upper triangle.
  explicit GramMatrix(CMatrix<Real> g) : g_(std::move(g)) {
    if (g_.rows() != g_.cols() || g_.rows() < 1) throw DimensionError("Gram matrix must be square and non-empty");
    const Real scale = g_.norm();
    if ((g_ - g_.adjoint()).norm() > Real(1e-8) * scale) throw ContractError("Gram matrix is not Hermitian");
    symmetrize();
  }

  Index dim() const noexcept { return g_.rows(); }
  const CMatrix<Real>& matrix() const noexcept { return g_; }
  const RVector<Real>& diag() const noexcept { return d_; }

  CMatrix<Real> hollow() const {
    CMatrix<Real> e = g_;
    e.diagonal().setZero();
    return e;
  }

  /// Smallest diagonal entry; zero or negative means D is not invertible.
  Real min_diag() const { return d_.minCoeff(); }

 private:
  struct Trusted {};
  GramMatrix(CMatrix<Real> g, Trusted) : g_(std::move(g)) { symmetrize(); }

  void symmetrize() {
    g_.template triangularView<Eigen::StrictlyLower>() = g_.adjoint().eval();
    g_.diagonal() = g_.diagonal().real().template cast<Complex<Real>>();
    d_ = g_.diagonal().real();
  }

  template <typename R>
  friend GramMatrix<R> gram(const ChannelMatrix<R>& h);

  CMatrix<Real> g_;
  RVector<Real> d_;
};

template <typename Real>
struct CorrelationCoefficient {
  Complex<Real> value;
  Real magnitude() const { return std::abs(value); }
};

/// Draws an M x K matrix of i.i.d. CN(0, 1) entries from `stream`, column by
/// column. Same (seed, stream id, M, K) gives the same matrix bit for bit.
template <typename Real = double>
ChannelMatrix<Real> sample_channel(Index m, Index k, Stream& stream) {
  if (k < 1 || m < k) {
    throw DimensionError("sample_channel needs M >= K >= 1, got M=" + std::to_string(m) + " K=" + std::to_string(k));
  }
  CMatrix<Real> h(m, k);
  for (Index col = 0; col < k; ++col) {
    for (Index row = 0; row < m; ++row) {
      const auto z = stream.complex_normal();
      h(row, col) = Complex<Real>(static_cast<Real>(z.real()), static_cast<Real>(z.imag()));
    }
  }
  return ChannelMatrix<Real>(std::move(h));
}

/// G = H^H H. Only the upper triangle is accumulated; the lower is mirrored.
template <typename Real>
GramMatrix<Real> gram(const ChannelMatrix<Real>& h) {
  const Index k = h.users();
  CMatrix<Real> g = CMatrix<Real>::Zero(k, k);
  g.template selfadjointView<Eigen::Upper>().rankUpdate(h.matrix().adjoint());
  return GramMatrix<Real>(std::move(g), typename GramMatrix<Real>::Trusted{});
}

/// r_ij = h_i^H h_j / (|h_i| |h_j|), zero-based column indices.
template <typename Real>
CorrelationCoefficient<Real> normalized_correlation(const ChannelMatrix<Real>& h, Index i, Index j) {
  const Index k = h.users();
  if (i < 0 || j < 0 || i >= k || j >= k) throw IndexError("correlation index out of range");
  if (i == j) throw IndexError("correlation needs two distinct users");
  const Real ni = h.column(i).norm();
  const Real nj = h.column(j).norm();
  if (!(ni > Real(0)) || !(nj > Real(0))) throw DegenerateInputError("zero-norm channel column");
  return {h.column(i).dot(h.column(j)) / (ni * nj)};
}

}  // namespace nsmia

#endif  // NSMIA_CHANNEL_HPP
