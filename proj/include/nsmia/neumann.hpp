#ifndef NSMIA_NEUMANN_HPP
#define NSMIA_NEUMANN_HPP

#include <optional>
#include <string>
#include <vector>

#include "nsmia/channel.hpp"
#include "nsmia/errors.hpp"
#include "nsmia/linalg.hpp"
#include "nsmia/types.hpp"

namespace nsmia {

enum class PreconditionerKind { Uniform, Attenuated, DiagInv };

/// Selection rule for the diagonal preconditioner Theta. `delta` is only read
/// for Attenuated and has no default.
struct PreconditionerSpec {
  PreconditionerKind kind = PreconditionerKind::DiagInv;
  std::optional<double> delta;

  static PreconditionerSpec uniform() { return {PreconditionerKind::Uniform, std::nullopt}; }
  static PreconditionerSpec attenuated(double delta) { return {PreconditionerKind::Attenuated, delta}; }
  static PreconditionerSpec diag_inverse() { return {PreconditionerKind::DiagInv, std::nullopt}; }
};

template <typename Real = double>
struct Preconditioner {
  PreconditionerKind kind;
  std::optional<Real> delta;
  RVector<Real> diag;
};

template <typename Real = double>
struct NsApproximation {
  CMatrix<Real> matrix;
  int terms;
  PreconditionerKind preconditioner_kind;
};

/// Theta per rule: 1/(M+K) (uniform), delta/(M+K) (attenuated) or 1/g_ii.
template <typename Real>
Preconditioner<Real> make_preconditioner(const GramMatrix<Real>& g, Index m, const PreconditionerSpec& spec) {
  const Index k = g.dim();
  switch (spec.kind) {
    case PreconditionerKind::Uniform:
    case PreconditionerKind::Attenuated: {
      if (m < k) throw DimensionError("preconditioner needs M >= K");
      Real scale = Real(1);
      std::optional<Real> delta;
      if (spec.kind == PreconditionerKind::Attenuated) {
        if (!spec.delta || !(*spec.delta > 0.0 && *spec.delta < 1.0)) {
          throw ParameterError("attenuation factor must lie in (0, 1)");
        }
        delta = static_cast<Real>(*spec.delta);
        scale = *delta;
      }
      const Real value = scale / static_cast<Real>(m + k);
      return {spec.kind, delta, RVector<Real>::Constant(k, value)};
    }
    case PreconditionerKind::DiagInv:
      if (!(g.min_diag() > Real(0))) throw DegenerateInputError("D^{-1} needs a strictly positive diagonal");
      return {spec.kind, std::nullopt, g.diag().cwiseInverse()};
  }
  throw ParameterError("unknown preconditioner kind");
}

/// I - Theta G.
template <typename Real>
CMatrix<Real> iteration_matrix(const GramMatrix<Real>& g, const Preconditioner<Real>& theta) {
  if (theta.diag.size() != g.dim()) throw DimensionError("preconditioner size does not match Gram matrix");
  CMatrix<Real> b = -(theta.diag.template cast<Complex<Real>>().asDiagonal() * g.matrix());
  b.diagonal().array() += Complex<Real>(1);
  return b;
}

/// sum_{n=0}^{N-1} (I - Theta G)^n Theta, accumulated as X <- (I - Theta G) X + Theta.
/// No convergence check: a divergent series simply yields a poor inverse.
template <typename Real>
NsApproximation<Real> ns_inverse(const GramMatrix<Real>& g, const Preconditioner<Real>& theta, int terms) {
  if (terms < 1) throw ParameterError("ns_inverse needs N >= 1");
  const CMatrix<Real> b = iteration_matrix(g, theta);
  const CMatrix<Real> t = theta.diag.template cast<Complex<Real>>().asDiagonal();
  CMatrix<Real> x = t;
  for (int n = 1; n < terms; ++n) {
    x = b * x;
    x += t;
  }
  return {std::move(x), terms, theta.kind};
}

/// prod_{l=0}^{L-1} [I + (I - Theta G)^{2^l}] Theta, i.e. the N = 2^L series
/// with one squaring and one multiplication per factor.
template <typename Real>
NsApproximation<Real> ns_inverse_product_form(const GramMatrix<Real>& g, const Preconditioner<Real>& theta,
                                              int levels) {
  if (levels < 1) throw ParameterError("product form needs L >= 1");
  if (levels > 30) throw ParameterError("product form supports L <= 30");
  CMatrix<Real> power = iteration_matrix(g, theta);
  CMatrix<Real> acc = power;
  acc.diagonal().array() += Complex<Real>(1);
  for (int l = 1; l < levels; ++l) {
    power = (power * power).eval();
    CMatrix<Real> factor = power;
    factor.diagonal().array() += Complex<Real>(1);
    acc = (acc * factor).eval();
  }
  CMatrix<Real> x = acc * theta.diag.template cast<Complex<Real>>().asDiagonal();
  return {std::move(x), 1 << levels, theta.kind};
}

/// Z = D^{-1} E.
template <typename Real>
CMatrix<Real> residual_generator(const GramMatrix<Real>& g) {
  if (!(g.min_diag() > Real(0))) throw DegenerateInputError("Z = D^{-1}E needs a strictly positive diagonal");
  CMatrix<Real> z = g.diag().cwiseInverse().template cast<Complex<Real>>().asDiagonal() * g.matrix();
  z.diagonal().setZero();
  return z;
}

/// sum_{n=0}^{N-1} (-D^{-1}E)^n D^{-1}; the D^{-1}-preconditioned series
/// written through the G = D + E split.
template <typename Real>
CMatrix<Real> ns_inverse_decomposed(const GramMatrix<Real>& g, int terms) {
  if (terms < 1) throw ParameterError("ns_inverse_decomposed needs N >= 1");
  const CMatrix<Real> neg_z = -residual_generator(g);
  const CMatrix<Real> d_inv = g.diag().cwiseInverse().template cast<Complex<Real>>().asDiagonal();
  CMatrix<Real> term = d_inv;
  CMatrix<Real> sum = d_inv;
  for (int n = 1; n < terms; ++n) {
    term = (neg_z * term).eval();
    sum += term;
  }
  return sum;
}

/// ZF estimate G_inv H^H y as two matrix-vector products.
template <typename Real, typename DerivedInv, typename DerivedY>
CVector<Real> zf_apply(const ChannelMatrix<Real>& h, const Eigen::MatrixBase<DerivedInv>& g_inv,
                       const Eigen::MatrixBase<DerivedY>& y) {
  const Index k = h.users();
  if (g_inv.rows() != k || g_inv.cols() != k) throw DimensionError("zf_apply: inverse must be K x K");
  if (y.cols() != 1 || y.rows() != h.antennas()) throw DimensionError("zf_apply: y must have length M");
  const CVector<Real> matched = h.matrix().adjoint() * y;
  return g_inv * matched;
}

/// Z^1 .. Z^{max_terms} by repeated multiplication.
template <typename Real>
std::vector<CMatrix<Real>> residual_matrix_powers(const GramMatrix<Real>& g, int max_terms) {
  if (max_terms < 1) throw ParameterError("need N >= 1");
  std::vector<CMatrix<Real>> powers;
  powers.reserve(static_cast<std::size_t>(max_terms));
  powers.push_back(residual_generator(g));
  for (int n = 1; n < max_terms; ++n) powers.push_back(powers.back() * powers.front());
  return powers;
}

/// ||Z^N||_F^2, the per-realization mean squared error of the N-term
/// D^{-1}-preconditioned series (unit-power, uncorrelated symbols).
template <typename Real>
Real residual_power(const GramMatrix<Real>& g, int terms) {
  return residual_matrix_powers(g, terms).back().squaredNorm();
}

/// ||Z^N||_F^2 for N = 1 .. max_terms.
template <typename Real>
std::vector<Real> residual_powers(const GramMatrix<Real>& g, int max_terms) {
  std::vector<Real> out;
  for (const auto& p : residual_matrix_powers(g, max_terms)) out.push_back(p.squaredNorm());
  return out;
}

/// Uplink error for a given symbol vector, straight from the definition:
/// ||(G^{-1} - G_N^{-1}) G s||^2.
template <typename Real, typename DerivedS>
Real uplink_error(const GramMatrix<Real>& g, const CMatrix<Real>& exact_inv, const CMatrix<Real>& approx_inv,
                  const Eigen::MatrixBase<DerivedS>& s) {
  const CVector<Real> gs = g.matrix() * s;
  return ((exact_inv - approx_inv) * gs).squaredNorm();
}

/// Downlink error for a given symbol vector, straight from the definition:
/// ||s^T (G^{-1} - G_N^{-1}) G||^2 (plain transpose).
template <typename Real, typename DerivedS>
Real downlink_error(const GramMatrix<Real>& g, const CMatrix<Real>& exact_inv, const CMatrix<Real>& approx_inv,
                    const Eigen::MatrixBase<DerivedS>& s) {
  const Eigen::Matrix<Complex<Real>, 1, Eigen::Dynamic> row = s.transpose() * (exact_inv - approx_inv);
  return (row * g.matrix()).squaredNorm();
}

/// Uplink MSE averaged over unit-power uncorrelated symbols:
/// E_s ||Z^N s||^2 = tr((Z^N)^H Z^N), summed column by column.
template <typename Real>
Real uplink_mse(const GramMatrix<Real>& g, int terms) {
  const CMatrix<Real> zn = residual_matrix_powers(g, terms).back();
  Real total = 0;
  for (Index c = 0; c < zn.cols(); ++c) total += zn.col(c).squaredNorm();
  return total;
}

/// Downlink MSE averaged over symbols: E_s ||s^T Z^N||^2, summed row by row.
template <typename Real>
Real downlink_mse(const GramMatrix<Real>& g, int terms) {
  const CMatrix<Real> zn = residual_matrix_powers(g, terms).back();
  Real total = 0;
  for (Index r = 0; r < zn.rows(); ++r) total += zn.row(r).squaredNorm();
  return total;
}

}  // namespace nsmia

#endif  // NSMIA_NEUMANN_HPP
