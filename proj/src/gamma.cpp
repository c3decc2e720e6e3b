#include "pellip/gamma.hpp"

#include <array>
#include <cmath>

#include "pellip/error.hpp"

namespace pellip {

namespace {

constexpr double lanczos_g = 5.24218750000000000;  // 671/128
constexpr double lanczos_c0 = 0.999999999999997092;
constexpr std::array<double, 14> lanczos_coefficients = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,     -0.491913816097620199,
    .339946499848118887e-4,  .465236289270485756e-4,  -.983744753048795646e-4, .158088703224912494e-3,
    -.210264441724104883e-3, .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5,
};
constexpr double sqrt_two_pi = 2.5066282746310005;

cplx log_sin_pi(cplx z) {
  // log sin(πz) without overflow for large |Im z|.
  const double y = z.imag();
  if (std::abs(y) < 20.0) return std::log(std::sin(pi * z));
  // sin(πz) = (e^{iπz} - e^{-iπz}) / 2i; the dominant exponential factors out.
  const cplx i(0.0, 1.0);
  if (y > 0.0) {
    // e^{-iπz} dominates: sin = (e^{-iπz}/(-2i)) (1 - e^{2iπz})
    return -i * pi * z - std::log(cplx(0.0, -2.0)) + std::log(1.0 - std::exp(2.0 * i * pi * z));
  }
  return i * pi * z - std::log(cplx(0.0, 2.0)) + std::log(1.0 - std::exp(-2.0 * i * pi * z));
}

}  // namespace

cplx log_gamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real()) {
    throw Error(ErrorKind::domain, "gamma has a pole at non-positive integers", z.real());
  }
  if (z.real() < 0.5) {
    // Γ(z) Γ(1-z) = π / sin(πz)
    return std::log(pi) - log_sin_pi(z) - log_gamma(1.0 - z);
  }
  cplx y = z;
  cplx tmp = z + lanczos_g;
  tmp = (z + 0.5) * std::log(tmp) - tmp;
  cplx ser = lanczos_c0;
  for (double c : lanczos_coefficients) {
    y += 1.0;
    ser += c / y;
  }
  return tmp + std::log(sqrt_two_pi * ser / z);
}

cplx complex_gamma(cplx z) { return std::exp(log_gamma(z)); }

}  // namespace pellip
