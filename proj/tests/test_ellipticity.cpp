#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pellip/ellipticity.hpp"
#include "pellip/error.hpp"

using namespace pellip;

namespace {

CMatrix random_elliptic_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(normal(rng), normal(rng));
  // Shift the Hermitian part so that λ(A) ∈ (0.1, 1.1).
  const double lam = lambda_of(a);
  a += cplx(0.1 + std::uniform_real_distribution<double>(0, 1)(rng) - lam, 0.0) * CMatrix::Identity(d, d);
  return a;
}

}  // namespace

TEST_SUITE("ellipticity") {

TEST_CASE("lambda and Lambda of simple matrices") {
  CHECK(lambda_of(CMatrix::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(capital_lambda_of(CMatrix::Identity(3, 3)) == doctest::Approx(1.0));
  CMatrix rot = std::polar(1.0, pi / 6) * CMatrix::Identity(2, 2);
  CHECK(lambda_of(rot) == doctest::Approx(std::cos(pi / 6)));
  CHECK(capital_lambda_of(rot) == doctest::Approx(1.0));
  CMatrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK(std::abs(lambda_of(skew)) < 1e-15);
}

TEST_CASE("delta_p matches the polished sphere minimum") {
  std::mt19937_64 rng(42);
  for (int d : {1, 2, 3}) {
    const auto samples = oracle::sphere_samples(d, 20000, 100 + d);
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix a = random_elliptic_matrix(d, rng);
      for (double p : {1.2, 1.5, 2.0, 3.0, 6.0}) {
        const double exact = delta_p(a, p);
        const double sampled = oracle::sphere_delta(a, mu_of(p), samples);
        CHECK(std::abs(exact - sampled) < 1e-8);
        CHECK(exact <= sampled + 1e-12);
      }
    }
  }
}

TEST_CASE("delta_2 is lambda and delta_p is symmetric under conjugation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix a = random_elliptic_matrix(1 + trial % 4, rng);
    CHECK(std::abs(delta_p(a, 2.0) - lambda_of(a)) < 1e-10);
    for (double p : {1.1, 1.5, 3.0, 7.0}) CHECK(std::abs(delta_p(a, p) - delta_p(a, conjugate_exponent(p))) < 1e-10);
  }
}

TEST_CASE("delta_p is nonincreasing in |1 - 2/p|") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_elliptic_matrix(2, rng);
    double previous = delta_mu(a, 0.0);
    for (int k = 1; k <= 20; ++k) {
      const double v = delta_mu(a, k / 20.0);
      CHECK(v <= previous + 1e-12);
      previous = v;
    }
  }
}

TEST_CASE("real matrices are p-elliptic for every p") {
  RMatrix b(2, 2);
  b << 2, 0.7, -0.3, 1;
  const CMatrix a = b.cast<cplx>();
  const PRange r = p_ellipticity_range(a);
  CHECK(std::isinf(r.p_max));
  CHECK(r.p_min == 1.0);
  for (double p : {1.01, 1.5, 3.0, 50.0}) CHECK(delta_p(a, p) > 0.0);
}

TEST_CASE("rotation e^{iθ} gives the classical range") {
  // Δ_p(e^{iθ}I) = cos θ - μ for scalar rotations, so μ* = cos θ.
  for (double theta : {0.3, 0.7, 1.2}) {
    const CMatrix a = std::polar(1.0, theta) * CMatrix::Identity(1, 1);
    const PRange r = p_ellipticity_range(a, 1e-12);
    CHECK(r.mu_star == doctest::Approx(std::cos(theta)).epsilon(1e-9));
    CHECK(r.p_max == doctest::Approx(2.0 / (1.0 - std::cos(theta))).epsilon(1e-8));
    CHECK(1.0 / r.p_min + 1.0 / r.p_max == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.contains(2.0));
    CHECK_FALSE(r.contains(r.p_max * 1.01));
  }
}

TEST_CASE("range boundary is where delta_p changes sign") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_elliptic_matrix(2, rng);
    const PRange r = p_ellipticity_range(a);
    if (std::isinf(r.p_max)) continue;
    CHECK(delta_p(a, r.p_max * 0.999) > 0.0);
    CHECK(delta_p(a, r.p_max * 1.001) < 0.0);
    CHECK(delta_p(a, r.p_min * 1.001) > 0.0);
  }
}

TEST_CASE("non-elliptic matrices are rejected") {
  CMatrix a = -CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(p_ellipticity_range(a), Error);
  try {
    p_ellipticity_range(a);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_elliptic);
  }
}

TEST_CASE("Sobolev exponents") {
  const auto e = sobolev_exponents(3, 2.0);
  CHECK(e.two_star == doctest::Approx(6.0));
  CHECK(e.p_upper == doctest::Approx(6.0));
  for (int d : {3, 4, 7}) {
    for (double p : {2.0, 2.5, 4.0}) {
      const auto s = sobolev_exponents(d, p);
      CHECK(s.p_lower < 2.0);
      CHECK(s.p_upper > 2.0);
      CHECK(1.0 / s.p_upper + 1.0 / s.p_lower == doctest::Approx(1.0));
      CHECK(s.p_upper == doctest::Approx(p * d / (d - 2.0)));
    }
  }
  CHECK_THROWS_AS(sobolev_exponents(2, 3.0), Error);
  CHECK_THROWS_AS(sobolev_exponents(3, 1.5), Error);
}

}
