#include "pellip/subordinate.hpp"

#include <cmath>
#include <ostream>

#include "pellip/error.hpp"
#include "pellip/gamma.hpp"

namespace pellip {

namespace {

void check_theta(double theta, int sign) {
  if (!(theta > 0.0 && theta < pi / 2)) throw Error(ErrorKind::domain, "theta must lie in (0, pi/2)", theta);
  if (sign != 1 && sign != -1) throw Error(ErrorKind::domain, "sign must be +1 or -1");
}

/// (e^{x} - 1) / x with its limit 1 at x = 0.
double exprel(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

/// log |e^{x} - 1|.
double log_abs_expm1(double x) {
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::abs(std::expm1(x)));
}

}  // namespace

cplx mellin_psi(double alpha, double u) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "Mellin transform of psi needs alpha > 0", alpha);
  return complex_gamma(cplx(alpha, -u));
}

cplx mellin_m_theta(double theta, int sign, double u) {
  check_theta(theta, sign);
  // (e^{∓θu} - 1)/(θu) = ∓ exprel(∓θu)
  const double bracket = -sign * exprel(-sign * theta * u);
  return cplx(0.0, theta) * bracket * complex_gamma(cplx(1.0, -u));
}

cplx mellin_transform(const MultiplierSpec& symbol, double u) {
  switch (symbol.kind) {
    case MultiplierSpec::Kind::psi_beta: return mellin_psi(symbol.beta, u);
    case MultiplierSpec::Kind::m_theta: return mellin_m_theta(symbol.theta, symbol.sign, u);
    default: throw Error(ErrorKind::domain, "closed-form Mellin transform only for psi_beta and m_theta");
  }
}

double log_abs_mellin(const MultiplierSpec& symbol, double u) {
  switch (symbol.kind) {
    case MultiplierSpec::Kind::psi_beta: return log_gamma(cplx(symbol.beta, -u)).real();
    case MultiplierSpec::Kind::m_theta: {
      check_theta(symbol.theta, symbol.sign);
      const double x = -symbol.sign * symbol.theta * u;
      // |iθ (e^x - 1)/(θu)| = |e^x - 1| / |u|, and θ at u = 0.
      const double front = u == 0.0 ? std::log(symbol.theta) : log_abs_expm1(x) - std::log(std::abs(u));
      return front + log_gamma(cplx(1.0, -u)).real();
    }
    default: throw Error(ErrorKind::domain, "closed-form Mellin transform only for psi_beta and m_theta");
  }
}

double mellin_decay_rate(const MultiplierSpec& symbol) {
  switch (symbol.kind) {
    case MultiplierSpec::Kind::psi_beta: return pi / 2;
    case MultiplierSpec::Kind::m_theta: return pi / 2 - symbol.theta;
    default: throw Error(ErrorKind::domain, "decay rate only for psi_beta and m_theta");
  }
}

double stirling_envelope(double alpha, double u) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "Stirling envelope needs alpha > 0", alpha);
  const double au = std::abs(u);
  return std::sqrt(2.0 * pi) * std::pow(1.0 + au, alpha - 0.5) * std::exp(-pi * au / 2.0);
}

cplx mellin_quadrature(const MultiplierSpec& symbol, double u, double step) {
  MultiplierSpec m = symbol;
  m.time_scale = 1.0;
  // λ = e^x: ∫ m(e^x) e^{-iux} dx. Both symbols decay like e^{min(β,1) x}
  // as x → -∞ and double-exponentially as x → +∞.
  const double left_rate = m.kind == MultiplierSpec::Kind::psi_beta ? std::min(m.beta, 1.0) : 1.0;
  const double x_lo = -40.0 / left_rate;
  const double x_hi = 6.0 - std::log(std::max(std::cos(m.theta), 1e-3));
  const int n = static_cast<int>(std::ceil((x_hi - x_lo) / step));
  const double h = (x_hi - x_lo) / n;
  cplx sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double x = x_lo + k * h;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    sum += w * m(cplx(std::exp(x), 0.0)) * std::polar(1.0, -u * x);
  }
  return h * sum;
}

MellinTable make_mellin_table(const MultiplierSpec& symbol, double truncation_u, int n_quad) {
  if (!(truncation_u > 0.0) || n_quad < 2) throw Error(ErrorKind::domain, "invalid Mellin table request");
  MellinTable table;
  table.symbol = symbol;
  table.truncation_u = truncation_u;
  const double h = 2.0 * truncation_u / n_quad;
  table.u_samples.resize(n_quad + 1);
  table.weights.resize(n_quad + 1);
  table.values.resize(n_quad + 1);
  for (int k = 0; k <= n_quad; ++k) {
    const double u = -truncation_u + k * h;
    table.u_samples[k] = u;
    table.weights[k] = (k == 0 || k == n_quad) ? 0.5 * h : h;
    table.values[k] = mellin_transform(symbol, u);
  }
  // Tail mass over |u| > U, integrated until the integrand is negligible.
  double tail = 0.0;
  const double dh = 0.01;
  const double rate = mellin_decay_rate(symbol);
  const double stop = truncation_u + 60.0 / rate;
  for (double u = truncation_u; u < stop; u += dh) {
    for (double s : {-1.0, 1.0}) tail += dh * std::exp(log_abs_mellin(symbol, s * (u + 0.5 * dh)));
  }
  table.tail_bound = tail;
  return table;
}

void write_csv(std::ostream& out, const MellinTable& table) {
  out.precision(17);
  const double alpha = table.symbol.kind == MultiplierSpec::Kind::psi_beta ? table.symbol.beta : 1.0;
  out << "u,re,im,envelope\n";
  for (std::size_t k = 0; k < table.u_samples.size(); ++k) {
    const double u = table.u_samples[k];
    out << u << ',' << table.values[k].real() << ',' << table.values[k].imag() << ','
        << stirling_envelope(alpha, u) << '\n';
  }
}

CVector cowling_reconstruct(const SpectralFactorization& f, const MellinTable& table, double t, const CVector& u,
                            double tol) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "reconstruction time must be positive", t);
  if (u.size() != f.size()) throw Error(ErrorKind::dimension, "vector size does not match factorization");
  const CVector& ev = f.eigenvalues();
  const double unorm = u.norm();
  if (unorm == 0.0) return CVector::Zero(u.size());

  if (tol > 0.0) {
    const double phi = f.max_argument();
    const double rate = mellin_decay_rate(table.symbol);
    if (!(phi < rate)) {
      throw Error(ErrorKind::truncation, "imaginary powers grow faster than the Mellin transform decays", phi);
    }
    auto tail_estimate = [&](double big_u) {
      double tail = 0.0;
      const double dh = 0.01;
      const double stop = big_u + 60.0 / (rate - phi);
      for (double v = big_u; v < stop; v += dh) {
        for (double s : {-1.0, 1.0}) {
          tail += dh * std::exp(log_abs_mellin(table.symbol, s * (v + 0.5 * dh)) + phi * (v + 0.5 * dh));
        }
      }
      return f.condition_number() * tail / (2.0 * pi);
    };
    const double estimate = tail_estimate(table.truncation_u);
    if (estimate > tol) {
      double suggested = table.truncation_u;
      while (tail_estimate(suggested) > tol && suggested < 1e4) suggested *= 1.5;
      throw Error(ErrorKind::truncation, "Mellin truncation tail exceeds tolerance; increase U", suggested);
    }
  }

  const CVector c = f.inverse_eigenvectors() * u;
  const double log_t = std::log(t);
  CVector scaled(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const cplx log_lambda = std::log(ev(k)) + log_t;  // log(tλ)
    cplx sum = 0.0;
    for (std::size_t j = 0; j < table.u_samples.size(); ++j) {
      const double uj = table.u_samples[j];
      sum += table.weights[j] * table.values[j] * std::exp(cplx(0.0, uj) * log_lambda);
    }
    scaled(k) = sum / (2.0 * pi) * c(k);
  }
  return f.right_eigenvectors() * scaled;
}

CVector cowling_reconstruct(const SpectralFactorization& f, const MultiplierSpec& symbol, double t,
                            const CVector& u, double truncation_u, int n_quad, double tol) {
  if (symbol.kind != MultiplierSpec::Kind::psi_beta && symbol.kind != MultiplierSpec::Kind::m_theta) {
    throw Error(ErrorKind::domain, "Cowling reconstruction supports psi_beta and m_theta symbols");
  }
  return cowling_reconstruct(f, make_mellin_table(symbol, truncation_u, n_quad), t, u, tol);
}

double subordination_bound(const MultiplierSpec& symbol, const ImaginaryPowerBound& ipb, double step) {
  const double rate = mellin_decay_rate(symbol);
  const double theta = ipb.fitted_theta;
  if (!(theta < rate)) {
    throw Error(ErrorKind::divergent_bound, "imaginary-power growth is not below the Mellin decay rate", theta);
  }
  const double margin = rate - theta;
  // e^{-margin U} below 1e-16 relative.
  const double big_u = 40.0 / margin + 20.0;
  const int n = static_cast<int>(std::ceil(2.0 * big_u / step));
  const double h = 2.0 * big_u / n;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double u = -big_u + k * h;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    sum += w * std::exp(log_abs_mellin(symbol, u) + theta * std::abs(u));
  }
  return ipb.fitted_constant * h * sum / (2.0 * pi);
}

}  // namespace pellip
