#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "pellip/error.hpp"
#include "pellip/subordinate.hpp"

using namespace pellip;

namespace {

SpectralFactorization checker(int n) {
  const Grid g = Grid::interval(1.0, n);
  CMatrix a1(1, 1), a2(1, 1);
  a1 << cplx(1, 0.5);
  a2 << cplx(2, -0.4);
  return factorize(assemble(MatrixField::checkerboard(g, a1, a2), BoundaryCondition::dirichlet()));
}

CVector bumps(Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(std::sin(3.0 * (i + 1) / n), std::cos(5.0 * i / n));
  return v;
}

}  // namespace

TEST_SUITE("subordinate") {

TEST_CASE("Mellin closed form of ψ_α against Simpson") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double u : {-6.0, -1.0, 0.0, 0.5, 4.0}) {
      const auto m = [alpha](double l) { return cplx(std::pow(l, alpha) * std::exp(-l)); };
      const cplx ref = oracle::mellin_simpson(m, u, -80.0 / alpha, 5.0, 40000);
      const cplx closed = mellin_psi(alpha, u);
      CHECK(std::abs(closed - ref) <= 1e-9 * std::abs(ref));
      const cplx via_spec = mellin_transform(MultiplierSpec::psi(alpha), u);
      CHECK(std::abs(via_spec - closed) <= 1e-14 * std::abs(closed));
    }
  }
}

TEST_CASE("Mellin closed form of m_θ against Simpson") {
  for (double theta : {0.2, 0.7, 1.2}) {
    for (int sign : {1, -1}) {
      for (double u : {-5.0, 0.0, 1e-9, 2.5}) {
        const auto m = [theta, sign](double l) {
          return std::exp(-std::polar(1.0, sign * theta) * l) - std::exp(-l);
        };
        const cplx ref = oracle::mellin_simpson(m, u, -60.0, std::log(60.0 / std::cos(theta)), 40000);
        const cplx closed = mellin_m_theta(theta, sign, u);
        CHECK(std::abs(closed - ref) <= 1e-9 * std::abs(ref));
      }
    }
  }
}

TEST_CASE("library quadrature agrees with the closed forms") {
  for (double u : {-8.0, 0.0, 3.0}) {
    const auto s = MultiplierSpec::rotation_difference(0.5, 1);
    const cplx closed = mellin_transform(s, u);
    CHECK(std::abs(mellin_quadrature(s, u) - closed) <= 1e-10 * std::abs(closed));
  }
}

TEST_CASE("log-modulus tracks the transform and survives underflow") {
  const auto s = MultiplierSpec::psi(1.0);
  CHECK(log_abs_mellin(s, 3.0) == doctest::Approx(std::log(std::abs(mellin_transform(s, 3.0)))).epsilon(1e-12));
  const double far = log_abs_mellin(s, 800.0);
  CHECK(std::isfinite(far));
  CHECK(far < -1200.0);
  CHECK(mellin_decay_rate(s) == doctest::Approx(pi / 2));
  CHECK(mellin_decay_rate(MultiplierSpec::rotation_difference(0.4, -1)) == doctest::Approx(pi / 2 - 0.4));
}

TEST_CASE("Stirling envelope bounds |Γ(α - iu)| up to a constant") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    double lo = INFINITY, hi = 0.0;
    for (double u = 5.0; u <= 200.0; u += 5.0) {
      const double r = std::exp(log_abs_mellin(MultiplierSpec::psi(alpha), u)) / stirling_envelope(alpha, u);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo < 2.0);
    CHECK(hi < 2.0);
  }
}

TEST_CASE("tables and csv") {
  const auto table = make_mellin_table(MultiplierSpec::psi(1.0), 20.0, 400);
  CHECK(table.u_samples.size() == 401);
  CHECK(table.u_samples.front() == doctest::Approx(-20.0));
  CHECK(table.tail_bound > 0.0);
  CHECK(table.tail_bound < 1e-10);
  std::ostringstream os;
  write_csv(os, table);
  CHECK(os.str().rfind("u,re,im,envelope\n", 0) == 0);
}

TEST_CASE("Cowling reconstruction recovers ψ_1(tL) f") {
  const auto f = checker(32);
  const CVector x = bumps(f.size());
  const double t = 1.0 / std::sqrt(f.min_modulus() * f.max_modulus());
  const auto s = MultiplierSpec::psi(1.0);
  const CVector direct = apply_function(f, MultiplierSpec::psi(1.0, t), x);
  double previous = INFINITY;
  for (double u_max : {10.0, 20.0, 40.0}) {
    const CVector rec = cowling_reconstruct(f, s, t, x, u_max, 4000, 0.0);
    const double err = (rec - direct).norm() / direct.norm();
    CHECK(err <= std::max(1.1 * previous, 1e-12));
    previous = err;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("Cowling reconstruction of m_θ") {
  const auto f = checker(24);
  const CVector x = bumps(f.size());
  const auto s = MultiplierSpec::rotation_difference(0.3, 1);
  const double t = 0.01;
  const CVector direct = apply_function(f, MultiplierSpec::rotation_difference(0.3, 1, t), x);
  const CVector rec = cowling_reconstruct(f, s, t, x, 60.0, 6000, 0.0);
  CHECK((rec - direct).norm() <= 1e-6 * direct.norm());
}

TEST_CASE("short truncation is reported with a suggested bound") {
  const auto f = checker(24);
  const CVector x = bumps(f.size());
  try {
    cowling_reconstruct(f, MultiplierSpec::psi(1.0), 0.01, x, 3.0, 400, 1e-10);
    FAIL("expected a truncation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::truncation);
    REQUIRE(e.value().has_value());
    CHECK(*e.value() > 3.0);
  }
}

TEST_CASE("subordination bound") {
  ImaginaryPowerBound ipb;
  ipb.fitted_constant = 1.0;
  ipb.fitted_theta = 0.0;
  const double b0 = subordination_bound(MultiplierSpec::psi(1.0), ipb);
  // θ = 0: (1/2π) ∫ |Γ(1 - iu)| du = (1/2π) ∫ √(πu / sinh πu) du.
  double ref = 0.0;
  const double h = 1e-3;
  for (double u = h / 2; u < 60.0; u += h) ref += 2 * h * std::sqrt(pi * u / std::sinh(pi * u));
  CHECK(b0 == doctest::Approx(ref / (2 * pi)).epsilon(1e-6));
  ipb.fitted_theta = 1.0;
  CHECK(subordination_bound(MultiplierSpec::psi(1.0), ipb) > b0);
  ipb.fitted_theta = pi / 2;
  CHECK_THROWS_AS(subordination_bound(MultiplierSpec::psi(1.0), ipb), Error);
  ipb.fitted_theta = 1.2;
  try {
    subordination_bound(MultiplierSpec::rotation_difference(0.5, 1), ipb);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::divergent_bound);
  }
}

}
