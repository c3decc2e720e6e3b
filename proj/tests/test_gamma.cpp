#include <doctest.h>

#include "pellip/error.hpp"
#include "pellip/gamma.hpp"

using namespace pellip;

namespace {

struct Reference {
  double re, im;
  double gamma_re, gamma_im;
  double log_abs;
};

// Γ and log|Γ| at 30 digits (mpmath 1.3.0).
const Reference table[] = {
    {0.5, 0, 1.7724538509055160273, 0.0, 0.57236494292470008707},
    {1, 0, 1.0, 0.0, 0.0},
    {0.1, 3, 0.013662874927575555855, -0.004915311156096227155, -4.2322187002605599256},
    {0.25, -7.5, 6.8593670473930208922e-6, -9.3385955446354091376e-6, -11.365620394646528259},
    {1.5, 20, -9.2572999228839608147e-13, -6.6344243004177963382e-13, -27.500943326754847609},
    {0.45, -50, 8.5196638716780641385e-35, -1.3569782076849195704e-34, -77.816478131754050866},
    {2, 1, 0.65296549642016672784, 0.34306583981654535759, -0.30434960902188368418},
    {0.01, 0.5, -0.35449345840593695344, -1.6080785768507629213, 0.49876617346312733703},
    {-0.3, 2, -0.026018281593738417964, -0.05562926693933295543, -2.7901324475129978739},
    {-2.5, 0.7, -0.15981871636293293015, -0.15756654908151528378, -1.4941873089113575064},
    {3.7, -12, -0.0000435868840261333063, 0.000020295257929209401633, -9.9426383081580890707},
    {1, -100, -1.5142531804977559698e-67, 2.7908215556174776333e-69, -153.8581090532909435},
};

}  // namespace

TEST_SUITE("gamma") {

TEST_CASE("matches high precision reference values") {
  for (const auto& r : table) {
    const cplx z(r.re, r.im);
    const cplx g = complex_gamma(z);
    const cplx expected(r.gamma_re, r.gamma_im);
    CHECK(std::abs(g - expected) <= 1e-12 * std::abs(expected));
    CHECK(std::abs(log_gamma(z).real() - r.log_abs) <= 1e-12 * std::max(1.0, std::abs(r.log_abs)));
  }
}

TEST_CASE("real arguments agree with std::tgamma") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0, -0.5, -3.3}) {
    CHECK(complex_gamma(cplx(x, 0.0)).real() == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
  }
}

TEST_CASE("recurrence and reflection") {
  for (cplx z : {cplx(0.3, 2.0), cplx(1.7, -5.0), cplx(0.05, 30.0)}) {
    CHECK(std::abs(complex_gamma(z + 1.0) - z * complex_gamma(z)) < 1e-12 * std::abs(z * complex_gamma(z)));
    const cplx lhs = complex_gamma(z) * complex_gamma(1.0 - z);
    const cplx rhs = pi / std::sin(pi * z);
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(rhs));
  }
}

TEST_CASE("|Γ(1/2 + iu)|² = π / cosh(πu)") {
  for (double u : {0.0, 1.0, 10.0, 60.0}) {
    const double v = std::norm(complex_gamma(cplx(0.5, u)));
    CHECK(v == doctest::Approx(pi / std::cosh(pi * u)).epsilon(1e-12));
  }
}

TEST_CASE("log-gamma stays finite where Γ underflows") {
  const cplx lg = log_gamma(cplx(1.0, 600.0));
  CHECK(std::isfinite(lg.real()));
  // Stirling: log|Γ(1+iu)| ≈ ½log(2π) + ½log u - πu/2.
  CHECK(lg.real() == doctest::Approx(0.5 * std::log(2 * pi) + 0.5 * std::log(600.0) - pi * 300.0).epsilon(1e-9));
}

TEST_CASE("poles are rejected") {
  for (double x : {0.0, -1.0, -4.0}) CHECK_THROWS_AS(complex_gamma(cplx(x, 0.0)), Error);
}

}
