#include <doctest.h>

#include <cmath>

#include "pellip/linalg.hpp"
#include "pellip/quadrature.hpp"

using namespace pellip;

namespace {

// ∫_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1).
double jacobi_mass(double a, double b) {
  return std::exp((a + b + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 2));
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
  for (int n : {1, 3, 8, 16}) {
    const auto rule = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(rule.integrate([deg](double x) { return std::pow(x, deg); }) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Jacobi integrates the weight and moments") {
  for (auto [a, b] : {std::pair{-0.5, -0.5}, {-0.9, 0.3}, {0.25, -0.75}, {-0.55, -0.45}, {1.5, 0.0}}) {
    const auto rule = gauss_jacobi(12, a, b);
    double mass = 0.0;
    for (double w : rule.weights) mass += w;
    CHECK(mass == doctest::Approx(jacobi_mass(a, b)).epsilon(1e-13));
    // (1+x) moment: ∫ (1-x)^a (1+x)^{b+1} = 2^{a+b+2} B(a+1, b+2).
    const double m1 = rule.integrate([](double x) { return 1.0 + x; });
    CHECK(m1 == doctest::Approx(jacobi_mass(a, b + 1)).epsilon(1e-12));
    for (double x : rule.nodes) CHECK(std::abs(x) < 1.0);
  }
}

TEST_CASE("graded beta rules integrate beta densities") {
  for (double alpha : {0.1, 0.25, 0.45}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const auto rule = graded_beta_rule(t, alpha - 1, -alpha, 512);
      double mass = 0.0;
      for (double w : rule.weights) mass += w;
      CHECK(std::abs(mass - (pi / std::sin(alpha * pi))) < 1e-10);
      // ∫ s · s^{α-1}(t-s)^{-α} ds = t B(α+1, 1-α) = t α π / sin(απ).
      CHECK(rule.integrate([](double s) { return s; }) == doctest::Approx(t * alpha * (pi / std::sin(alpha * pi))).epsilon(1e-10));
    }
  }
}

TEST_CASE("graded rules resolve boundary layers") {
  // ∫_0^1 λ e^{-λ s} ds = 1 - e^{-λ}, with λ large.
  for (double lambda : {1e2, 1e4, 1e6}) {
    const auto rule = graded_beta_rule(1.0, 0.0, 0.0, 512);
    const double v = rule.integrate([lambda](double s) { return lambda * std::exp(-lambda * s); });
    CHECK(v == doctest::Approx(-std::expm1(-lambda)).epsilon(1e-10));
  }
}

TEST_CASE("shifted rules decrease the mass") {
  for (double w : {0.1, 1.0, 10.0}) {
    const auto base = graded_beta_rule(1.0, -0.75, -0.25, 512);
    const auto shifted = graded_shifted_beta_rule(1.0, w, -0.75, -0.25, 512);
    double m0 = 0.0, m1 = 0.0;
    for (double x : base.weights) m0 += x;
    for (double x : shifted.weights) m1 += x;
    CHECK(m1 < m0);
    // Compare with a brute force midpoint sum on the smooth shifted density.
    const auto gl = graded_beta_rule(1.0, 0.0, -0.25, 512);
    const double ref = gl.integrate([w](double s) { return std::pow(w + s, -0.75); });
    CHECK(m1 == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("log grids") {
  const auto g = log_grid(1e-3, 1e2, 10);
  CHECK(g.size() == 51);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g.back() == doctest::Approx(1e2));
  const auto r = refine_log_grid(g);
  CHECK(r.size() == 101);
  CHECK(r[1] == doctest::Approx(std::sqrt(g[0] * g[1])));
  const auto l = logspace(1e-3, 1e3, 25);
  CHECK(l.size() == 25);
  CHECK(l[12] == doctest::Approx(1.0));
}

}
