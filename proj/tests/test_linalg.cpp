#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "nsmia/analysis.hpp"
#include "nsmia/linalg.hpp"
#include "oracles.hpp"

using namespace nsmia;
using oracle::cd;

namespace {

GramMatrix<double> random_gram(int m, int k, std::uint64_t id) {
  Stream s(31, id);
  return gram(sample_channel(m, k, s));
}

// max |lambda| of I - D^{-1} G from a general (non-Hermitian) eigensolve.
double general_radius(const GramMatrix<double>& g) {
  CMatrixXd b = -(g.diag().cwiseInverse().cast<cd>().asDiagonal() * g.matrix());
  b.diagonal().array() += 1.0;
  Eigen::ComplexEigenSolver<CMatrixXd> es(b, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("matmul") {
  Stream s(30, 0);
  const auto a = sample_channel(4, 4, s).matrix();
  const auto b = sample_channel(4, 4, s).matrix();
  CHECK(matmul(a, CMatrixXd::Identity(4, 4)) == a);
  CHECK_THROWS_AS(matmul(CMatrixXd(2, 3), CMatrixXd(2, 3)), DimensionError);
  const auto c = matmul(a, b);
  const auto ref = oracle::loop_matmul(a, b);
  CHECK(std::abs(c(0, 0) - ref(0, 0)) <= 1e-14 * std::abs(ref(0, 0)) + 1e-15);
  CHECK((c - ref).norm() <= 1e-13 * ref.norm());
}

TEST_CASE("frobenius_norm_sq") {
  CHECK(frobenius_norm_sq(CMatrixXd::Zero(3, 4)) == 0.0);
  CHECK(frobenius_norm_sq(CMatrixXd::Identity(7, 7)) == 7.0);
  CMatrixXd a(1, 1);
  a(0, 0) = cd(3, 4);
  CHECK(frobenius_norm_sq(a) == doctest::Approx(25.0).epsilon(1e-15));
}

TEST_CASE("hermitian_eig_extremes simple cases") {
  CMatrixXd d = CMatrixXd::Zero(3, 3);
  d.diagonal() << 1.0, 5.0, 2.0;
  const auto e = hermitian_eig_extremes(d);
  CHECK(e.lambda_min == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.lambda_max == doctest::Approx(5.0).epsilon(1e-14));

  Stream s(32, 0);
  const CMatrixXd q = Eigen::HouseholderQR<CMatrixXd>(sample_channel(6, 3, s).matrix()).householderQ() *
                      CMatrixXd::Identity(6, 3);
  const auto u = hermitian_eig_extremes(gram(ChannelMatrix<double>(q)));
  CHECK(u.lambda_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.lambda_max == doctest::Approx(1.0).epsilon(1e-12));

  CMatrixXd n(2, 2);
  n << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(hermitian_eig_extremes(n), ContractError);
}

TEST_CASE("hermitian_eig_extremes matches a general eigensolver") {
  for (int t = 0; t < 20; ++t) {
    const auto g = random_gram(40, 12, 100 + t);
    const auto e = hermitian_eig_extremes(g);
    Eigen::ComplexEigenSolver<CMatrixXd> es(g.matrix(), false);
    const auto re = es.eigenvalues().real();
    CHECK(std::abs(e.lambda_min - re.minCoeff()) <= 1e-8 * re.maxCoeff());
    CHECK(std::abs(e.lambda_max - re.maxCoeff()) <= 1e-8 * re.maxCoeff());
  }
}

// At K=16 the finite-size mean of lambda_max sits visibly below the
// asymptotic edge (Tracy-Widom shift of order K^{-2/3}); measured ~4.4% low.
TEST_CASE("Wishart lambda_max approaches the Marchenko-Pastur edge from below") {
  const int m = 512, k = 16, trials = 1000;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) sum += hermitian_eig_extremes(random_gram(m, k, 200 + t)).lambda_max / m;
  const double edge = analysis::mp_eigen_limits(m, k).lambda_max / m;
  const double rel = sum / trials / edge - 1.0;
  MESSAGE("mean lambda_max/M relative to edge: " << rel);
  CHECK(rel < 0.0);
  CHECK(rel > -0.05);
}

TEST_CASE("iteration_spectral_radius special cases") {
  CMatrixXd d = CMatrixXd::Zero(3, 3);
  d.diagonal() << 2.0, 7.0, 0.5;
  CHECK(iteration_spectral_radius(GramMatrix<double>(d)) == 0.0);

  CHECK_THROWS_AS(iteration_spectral_radius(GramMatrix<double>(CMatrixXd::Zero(2, 2))), DegenerateInputError);

  for (int t = 0; t < 50; ++t) {
    Stream s(33, t);
    const auto h = sample_channel(5, 2, s);
    const auto g = gram(h);
    const double c = normalized_correlation(h, 0, 1).magnitude();
    CMatrixXd b = -(g.diag().cwiseInverse().cast<cd>().asDiagonal() * g.matrix());
    b.diagonal().array() += 1.0;
    const auto [l1, l2] = oracle::eig2(b);
    const double rho = iteration_spectral_radius(g);
    CHECK(rho == doctest::Approx(c).epsilon(1e-10));
    CHECK(rho == doctest::Approx(std::max(std::abs(l1), std::abs(l2))).epsilon(1e-8));
  }
}

TEST_CASE("spectral radius: similarity route vs general eigensolve") {
  Stream pick(34, 0);
  for (int t = 0; t < 1000; ++t) {
    const int m = 8 + static_cast<int>(pick() % 121);
    const int k = 1 + static_cast<int>(pick() % static_cast<unsigned>(std::min(m, 16)));
    const auto g = random_gram(m, k, 1000 + t);
    const double rho = iteration_spectral_radius(g);
    CHECK(std::abs(rho - general_radius(g)) <= 1e-8 * std::max(1.0, rho));
    const auto ext = hermitian_eig_extremes(diag_normalized(g));
    CHECK((rho < 1.0) == (ext.lambda_min > 0.0 && ext.lambda_max < 2.0));
  }
}

TEST_CASE("Wishart draws with M >= 2K are positive definite") {
  Stream pick(35, 0);
  for (int t = 0; t < 1000; ++t) {
    const int m = 4 + static_cast<int>(pick() % 200);
    const int k = 1 + static_cast<int>(pick() % static_cast<unsigned>(m / 2));
    CHECK(hermitian_eig_extremes(random_gram(m, k, 5000 + t)).lambda_min > 0.0);
  }
}

TEST_CASE("exact_inverse") {
  CHECK(exact_inverse(GramMatrix<double>(CMatrixXd::Identity(3, 3))).isApprox(CMatrixXd::Identity(3, 3), 1e-15));
  CMatrixXd d = CMatrixXd::Zero(2, 2);
  d.diagonal() << 2.0, 4.0;
  const auto inv = exact_inverse(GramMatrix<double>(d));
  CHECK(inv(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inv(1, 1).real() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(inv(0, 1)) == 0.0);

  for (int t = 0; t < 100; ++t) {
    const auto g = random_gram(64, 16, 9000 + t);
    const CMatrixXd r = matmul(g.matrix(), exact_inverse(g)) - CMatrixXd::Identity(16, 16);
    CHECK(r.norm() <= 1e-8 * 4.0);
  }

  CMatrixXd sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(exact_inverse(GramMatrix<double>(sing)), SingularityError);
  CMatrixXd neg = CMatrixXd::Zero(2, 2);
  neg.diagonal() << -1.0, 1.0;
  CHECK_THROWS_AS(exact_inverse(GramMatrix<double>(neg)), SingularityError);
}

}  // TEST_SUITE
