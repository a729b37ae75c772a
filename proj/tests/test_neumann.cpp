#include <doctest.h>

#include <cmath>

#include "nsmia/neumann.hpp"
#include "oracles.hpp"

using namespace nsmia;
using oracle::cd;

namespace {

GramMatrix<double> random_gram(int m, int k, std::uint64_t id) {
  Stream s(41, id);
  return gram(sample_channel(m, k, s));
}

GramMatrix<double> diagonal_gram(std::initializer_list<double> values) {
  CMatrixXd d = CMatrixXd::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) {
    d(i, i) = v;
    ++i;
  }
  return GramMatrix<double>(d);
}

double rel(const CMatrixXd& a, const CMatrixXd& b) { return (a - b).norm() / b.norm(); }

CVectorXd random_unit_power(int k, Stream& s) {
  CVectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = s.complex_normal();
  return v / std::sqrt(v.squaredNorm() / k);
}

}  // namespace

TEST_SUITE("neumann") {

TEST_CASE("preconditioner rules") {
  const auto g = random_gram(128, 16, 1);
  const auto u = make_preconditioner(g, 128, PreconditionerSpec::uniform());
  CHECK(u.diag.size() == 16);
  CHECK((u.diag.array() == 1.0 / 144.0).all());
  const auto a = make_preconditioner(g, 128, PreconditionerSpec::attenuated(0.5));
  CHECK((a.diag.array() == 1.0 / 288.0).all());
  CHECK(a.delta == 0.5);

  const auto d = make_preconditioner(diagonal_gram({2.0, 4.0}), 2, PreconditionerSpec::diag_inverse());
  CHECK(d.diag(0) == 0.5);
  CHECK(d.diag(1) == 0.25);

  for (double bad : {0.0, 1.0, 1.5, -0.2}) {
    CHECK_THROWS_AS(make_preconditioner(g, 128, PreconditionerSpec::attenuated(bad)), ParameterError);
  }
  CHECK_THROWS_AS(make_preconditioner(g, 128, PreconditionerSpec{PreconditionerKind::Attenuated, std::nullopt}),
                  ParameterError);
  CHECK_THROWS_AS(make_preconditioner(diagonal_gram({0.0, 1.0}), 2, PreconditionerSpec::diag_inverse()),
                  DegenerateInputError);
}

TEST_CASE("ns_inverse trivial cases") {
  const auto dg = diagonal_gram({2.0, 5.0, 0.25});
  const auto dth = make_preconditioner(dg, 3, PreconditionerSpec::diag_inverse());
  CHECK(rel(ns_inverse(dg, dth, 1).matrix, exact_inverse(dg)) < 1e-15);

  const auto g = random_gram(32, 6, 2);
  const auto th = make_preconditioner(g, 32, PreconditionerSpec::diag_inverse());
  const auto one = ns_inverse(g, th, 1);
  CHECK(one.terms == 1);
  CHECK(one.preconditioner_kind == PreconditionerKind::DiagInv);
  CHECK(one.matrix == CMatrixXd(g.diag().cwiseInverse().cast<cd>().asDiagonal()));
  CHECK_THROWS_AS(ns_inverse(g, th, 0), ParameterError);
}

TEST_CASE("ns_inverse converges to the exact inverse") {
  int used = 0;
  for (int t = 0; t < 20; ++t) {
    const auto g = random_gram(128, 8, 100 + t);
    if (!(iteration_spectral_radius(g) < 1.0)) continue;
    ++used;
    const auto th = make_preconditioner(g, 128, PreconditionerSpec::diag_inverse());
    const CMatrixXd exact = exact_inverse(g);
    CHECK((ns_inverse(g, th, 20).matrix - exact).norm() <= 1e-6 * exact.norm());
  }
  CHECK(used >= 15);
}

TEST_CASE("D^{-1} series equals the decomposed form") {
  for (int t = 0; t < 50; ++t) {
    const auto g = random_gram(64, 8, 200 + t);
    const auto th = make_preconditioner(g, 64, PreconditionerSpec::diag_inverse());
    for (int n : {1, 2, 3, 5, 8}) {
      CHECK(rel(ns_inverse(g, th, n).matrix, ns_inverse_decomposed(g, n)) <= 1e-12);
    }
  }
}

TEST_CASE("product form equals the 2^L-term series") {
  for (int t = 0; t < 50; ++t) {
    const auto g = random_gram(96, 12, 300 + t);
    for (const auto& spec : {PreconditionerSpec::diag_inverse(), PreconditionerSpec::uniform()}) {
      const auto th = make_preconditioner(g, 96, spec);
      for (int l : {1, 2, 3}) {
        const auto pf = ns_inverse_product_form(g, th, l);
        CHECK(pf.terms == (1 << l));
        CHECK(rel(pf.matrix, ns_inverse(g, th, 1 << l).matrix) <= 1e-10);
      }
    }
  }
  const auto dg = diagonal_gram({3.0, 0.5});
  const auto dth = make_preconditioner(dg, 2, PreconditionerSpec::diag_inverse());
  for (int l = 1; l <= 5; ++l) CHECK(rel(ns_inverse_product_form(dg, dth, l).matrix, exact_inverse(dg)) < 1e-15);
  CHECK_THROWS_AS(ns_inverse_product_form(dg, dth, 0), ParameterError);
}

TEST_CASE("zf_apply") {
  Stream s(42, 0);
  const auto h = sample_channel(32, 4, s);
  const auto g = gram(h);
  const CVectorXd sym = random_unit_power(4, s);
  const CVectorXd y = h.matrix() * sym;
  const CVectorXd est = zf_apply(h, exact_inverse(g), y);
  CHECK((est - sym).norm() <= 1e-8 * sym.norm());

  const auto h1 = sample_channel(16, 1, s);
  const auto g1 = gram(h1);
  const auto th1 = make_preconditioner(g1, 16, PreconditionerSpec::diag_inverse());
  CVectorXd s1(1);
  s1(0) = cd(0.6, -0.8);
  CHECK((zf_apply(h1, ns_inverse(g1, th1, 1).matrix, h1.matrix() * s1) - s1).norm() <= 1e-14);

  CHECK_THROWS_AS(zf_apply(h, CMatrixXd::Identity(3, 3), y), DimensionError);
  CHECK_THROWS_AS(zf_apply(h, exact_inverse(g), CVectorXd::Zero(31)), DimensionError);
}

TEST_CASE("ZF error with the 2-term series equals ||Z^2 s||^2") {
  for (int t = 0; t < 50; ++t) {
    Stream s(43, t);
    const auto h = sample_channel(128, 8, s);
    const auto g = gram(h);
    const auto th = make_preconditioner(g, 128, PreconditionerSpec::diag_inverse());
    const CVectorXd sym = random_unit_power(8, s);
    const CVectorXd est = zf_apply(h, ns_inverse(g, th, 2).matrix, h.matrix() * sym);
    const CMatrixXd z = residual_generator(g);
    const double ref = (z * z * sym).squaredNorm();
    CHECK(std::abs((est - sym).squaredNorm() - ref) <= 1e-10 * ref);
  }
}

TEST_CASE("residual_power oracles") {
  const auto dg = diagonal_gram({1.0, 2.0, 3.0});
  for (int n = 1; n <= 6; ++n) CHECK(residual_power(dg, n) == 0.0);

  for (int t = 0; t < 20; ++t) {
    const auto g = random_gram(24, 5, 400 + t);
    double loop = 0.0;
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 5; ++j) {
        if (i != j) loop += std::norm(g.matrix()(i, j) / g.diag()(i));
      }
    }
    CHECK(residual_power(g, 1) == doctest::Approx(loop).epsilon(1e-13));
  }

  // K=2: Z^2 = |r|^2 I, so ||Z^N||^2 is 2|r|^{2N} for even N and
  // |r|^{2(N-1)} (|z12|^2 + |z21|^2) for odd N.
  for (int t = 0; t < 20; ++t) {
    const auto g = random_gram(10, 2, 500 + t);
    const double z12 = std::norm(g.matrix()(0, 1)) / (g.diag()(0) * g.diag()(0));
    const double z21 = std::norm(g.matrix()(1, 0)) / (g.diag()(1) * g.diag()(1));
    const double r2 = std::norm(g.matrix()(0, 1)) / (g.diag()(0) * g.diag()(1));
    for (int n = 1; n <= 6; ++n) {
      const double ref = n % 2 == 0 ? 2.0 * std::pow(r2, n) : std::pow(r2, n - 1) * (z12 + z21);
      CHECK(residual_power(g, n) == doctest::Approx(ref).epsilon(1e-12));
    }
    const auto all = residual_powers(g, 6);
    REQUIRE(all.size() == 6);
    CHECK(all[3] == residual_power(g, 4));
  }
}

TEST_CASE("series error decays at the spectral-radius rate") {
  double ratio_sum = 0.0;
  double rho_sum = 0.0;
  int used = 0;
  for (int t = 0; t < 100; ++t) {
    const auto g = random_gram(128, 16, 600 + t);
    const double rho = iteration_spectral_radius(g);
    if (!(rho < 1.0)) continue;
    const auto th = make_preconditioner(g, 128, PreconditionerSpec::diag_inverse());
    const CMatrixXd exact = exact_inverse(g);
    const double e8 = (ns_inverse(g, th, 8).matrix - exact).norm();
    const double e9 = (ns_inverse(g, th, 9).matrix - exact).norm();
    ratio_sum += e9 / e8;
    rho_sum += rho;
    ++used;
  }
  REQUIRE(used > 90);
  CHECK(ratio_sum / used <= rho_sum / used + 0.05);
}

TEST_CASE("uplink and downlink expressions agree") {
  for (int t = 0; t < 50; ++t) {
    Stream s(44, t);
    const auto g = gram(sample_channel(64, 8, s));
    const auto th = make_preconditioner(g, 64, PreconditionerSpec::diag_inverse());
    const CMatrixXd exact = exact_inverse(g);
    for (int n = 1; n <= 4; ++n) {
      const CMatrixXd approx = ns_inverse(g, th, n).matrix;
      const CMatrixXd zn = residual_matrix_powers(g, n).back();
      const CVectorXd sym = random_unit_power(8, s);
      const double up_ref = (zn * sym).squaredNorm();
      const double down_ref = (zn.transpose() * sym).squaredNorm();
      CHECK(std::abs(uplink_error(g, exact, approx, sym) - up_ref) <= 1e-10 * up_ref);
      CHECK(std::abs(downlink_error(g, exact, approx, sym) - down_ref) <= 1e-10 * down_ref);
      const double up = uplink_mse(g, n);
      CHECK(std::abs(up - downlink_mse(g, n)) <= 1e-12 * up);
      CHECK(std::abs(up - residual_power(g, n)) <= 1e-12 * up);
    }
  }
}

TEST_CASE("uniform preconditioner eigenvalue window") {
  const std::pair<int, int> configs[] = {{128, 16}, {96, 16}, {256, 32}};
  for (const auto& [m, k] : configs) {
    const double alpha = static_cast<double>(m) / k;
    const double half = 2.0 * std::sqrt(alpha) / (1.0 + alpha);
    int inside = 0;
    const int draws = 1000;
    for (int t = 0; t < draws; ++t) {
      const auto g = random_gram(m, k, 700000 + static_cast<std::uint64_t>(m) * 10000 + t);
      const auto th = make_preconditioner(g, m, PreconditionerSpec::uniform());
      const auto e = hermitian_eig_extremes(g);
      const double lo = th.diag(0) * e.lambda_min;
      const double hi = th.diag(0) * e.lambda_max;
      inside += lo >= 1.0 - half - 0.1 && hi <= 1.0 + half + 0.1;
    }
    CAPTURE(m);
    CHECK(inside >= 0.95 * draws);
  }
}

}  // TEST_SUITE
