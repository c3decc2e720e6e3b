#include "pellip/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "pellip/error.hpp"
#include "pellip/quadrature.hpp"

namespace pellip {

// ---------------------------------------------------------------------------
// Symbols

MultiplierSpec MultiplierSpec::semigroup(double t) {
  MultiplierSpec m;
  m.kind = Kind::exp;
  m.time_scale = t;
  return m;
}

MultiplierSpec MultiplierSpec::psi(double beta, double t) {
  MultiplierSpec m;
  m.kind = Kind::psi_beta;
  m.beta = beta;
  m.time_scale = t;
  return m;
}

MultiplierSpec MultiplierSpec::rotation_difference(double theta, int sign, double t) {
  MultiplierSpec m;
  m.kind = Kind::m_theta;
  m.theta = theta;
  m.sign = sign;
  m.time_scale = t;
  return m;
}

MultiplierSpec MultiplierSpec::imaginary(double u) {
  MultiplierSpec m;
  m.kind = Kind::imaginary_power;
  m.u = u;
  return m;
}

MultiplierSpec MultiplierSpec::power(cplx alpha, double t) {
  MultiplierSpec m;
  m.kind = Kind::fractional_power;
  m.alpha = alpha;
  m.time_scale = t;
  return m;
}

MultiplierSpec MultiplierSpec::ergodic(double t) {
  MultiplierSpec m;
  m.kind = Kind::ergodic_average;
  m.time_scale = t;
  return m;
}

void MultiplierSpec::validate() const {
  if (!(time_scale >= 0.0)) throw Error(ErrorKind::domain, "time scale must be non-negative", time_scale);
  switch (kind) {
    case Kind::psi_beta:
      if (!(beta > 0.0)) throw Error(ErrorKind::domain, "psi_beta needs beta > 0", beta);
      break;
    case Kind::m_theta:
      if (!(theta > 0.0 && theta < pi / 2)) throw Error(ErrorKind::domain, "m_theta needs 0 < theta < pi/2", theta);
      if (sign != 1 && sign != -1) throw Error(ErrorKind::domain, "m_theta sign must be +1 or -1");
      break;
    default:
      break;
  }
}

cplx MultiplierSpec::operator()(cplx lambda) const {
  const cplx z = time_scale * lambda;
  switch (kind) {
    case Kind::exp:
      return std::exp(-z);
    case Kind::psi_beta:
      if (z == 0.0) return 0.0;
      return std::exp(beta * std::log(z) - z);
    case Kind::m_theta:
      return std::exp(-std::polar(1.0, sign * theta) * z) - std::exp(-z);
    case Kind::imaginary_power:
      return std::exp(cplx(0.0, u) * std::log(lambda));
    case Kind::fractional_power:
      if (z == 0.0) {
        if (alpha == 0.0) return 1.0;
        if (alpha.real() > 0.0) return 0.0;
        return cplx(INFINITY, 0.0);
      }
      return std::exp(alpha * std::log(z));
    case Kind::ergodic_average: {
      if (std::abs(z) < 1e-2) {
        // Σ_k (-z)^k / (k+1)!
        cplx sum = 0.0;
        cplx term = 1.0;
        for (int k = 0; k < 10; ++k) {
          sum += term;
          term *= -z / static_cast<double>(k + 2);
        }
        return sum;
      }
      return (1.0 - std::exp(-z)) / z;
    }
  }
  return 0.0;
}

std::optional<cplx> MultiplierSpec::at_zero() const {
  switch (kind) {
    case Kind::exp:
    case Kind::ergodic_average:
      return cplx(1.0);
    case Kind::psi_beta:
    case Kind::m_theta:
      return cplx(0.0);
    case Kind::imaginary_power:
      if (u == 0.0) return cplx(1.0);
      return std::nullopt;
    case Kind::fractional_power:
      if (alpha == 0.0) return cplx(1.0);
      if (alpha.real() > 0.0) return cplx(0.0);
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Factorization

SpectralFactorization factorize(const DiscreteOperator& op, double max_condition) {
  SpectralFactorization f;
  f.op_ = op;
  const CMatrix& l = op.matrix();
  const Eigen::Index n = l.rows();
  f.kernel_dim_ = op.kernel_dim();

  CMatrix basis;  // orthonormal basis of the kernel complement
  CMatrix reduced;
  if (f.kernel_dim_ > 0) {
    const CVector ones = CVector::Ones(n);
    Eigen::HouseholderQR<CMatrix> qr(ones);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    basis = q.rightCols(n - 1);
    reduced = basis.adjoint() * l * basis;
    f.kernel_projector_ = kernel_projection(op).projector;
  } else {
    reduced = l;
  }

  Eigen::ComplexEigenSolver<CMatrix> es(reduced);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::accuracy, "eigenvalue iteration did not converge");
  const Eigen::Index m = reduced.rows();
  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  const CVector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(ev(a));
    const double mb = std::abs(ev(b));
    if (ma != mb) return ma < mb;
    return ev(a).imag() < ev(b).imag();
  });
  CMatrix v(m, m);
  f.eigenvalues_.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    f.eigenvalues_(k) = ev(order[k]);
    v.col(k) = es.eigenvectors().col(order[k]).normalized();
  }

  Eigen::BDCSVD<CMatrix> svd(v);
  const auto& sv = svd.singularValues();
  f.condition_number_ = sv(m - 1) > 0.0 ? sv(0) / sv(m - 1) : INFINITY;
  if (!(f.condition_number_ <= max_condition)) {
    throw Error(ErrorKind::ill_conditioned, "eigenvector matrix too ill-conditioned; use the quadrature path",
                f.condition_number_);
  }
  const CMatrix v_inv = v.partialPivLu().inverse();
  const CMatrix rebuilt = v * f.eigenvalues_.asDiagonal() * v_inv;
  f.residual_ = (rebuilt - reduced).norm() / reduced.norm();
  if (!(f.residual_ <= 1e-8)) {
    throw Error(ErrorKind::accuracy, "eigendecomposition does not reproduce the operator", f.residual_);
  }
  const double scale = f.eigenvalues_.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < m; ++k) {
    if (f.eigenvalues_(k).real() < -1e-10 * scale) {
      throw Error(ErrorKind::accuracy, "eigenvalue with negative real part; operator is not accretive",
                  f.eigenvalues_(k).real());
    }
  }

  if (f.kernel_dim_ > 0) {
    f.v_ = basis * v;
    f.v_inv_ = v_inv * basis.adjoint();
  } else {
    f.v_ = v;
    f.v_inv_ = v_inv;
  }
  return f;
}

double SpectralFactorization::min_modulus() const { return eigenvalues_.cwiseAbs().minCoeff(); }
double SpectralFactorization::max_modulus() const { return eigenvalues_.cwiseAbs().maxCoeff(); }

double SpectralFactorization::max_argument() const {
  double out = 0.0;
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) out = std::max(out, std::abs(std::arg(eigenvalues_(k))));
  return out;
}

CMatrix SpectralFactorization::function_matrix(const CVector& symbol_values, std::optional<cplx> at_zero) const {
  CMatrix out = v_ * symbol_values.asDiagonal() * v_inv_;
  if (kernel_dim_ > 0) {
    if (!at_zero) throw Error(ErrorKind::singular_symbol, "symbol undefined on the kernel");
    out += *at_zero * kernel_projector_;
  }
  return out;
}

namespace {

CVector symbol_values(const SpectralFactorization& f, const MultiplierSpec& m) {
  m.validate();
  CVector values(f.eigenvalues().size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    values(k) = m(f.eigenvalues()(k));
    if (!std::isfinite(values(k).real()) || !std::isfinite(values(k).imag())) {
      throw Error(ErrorKind::singular_symbol, "symbol undefined at an eigenvalue", std::abs(f.eigenvalues()(k)));
    }
  }
  return values;
}

}  // namespace

CMatrix SpectralFactorization::function_matrix(const MultiplierSpec& m) const {
  return function_matrix(symbol_values(*this, m), m.at_zero());
}

CVector apply_function(const SpectralFactorization& f, const MultiplierSpec& m, const CVector& u) {
  if (u.size() != f.size()) throw Error(ErrorKind::dimension, "vector size does not match factorization");
  const CVector values = symbol_values(f, m);
  CVector out = f.right_eigenvectors() * values.cwiseProduct(f.inverse_eigenvectors() * u);
  if (f.kernel_dim() > 0) {
    const CVector pu = f.kernel_projector() * u;
    const auto m0 = m.at_zero();
    if (m0) {
      out += *m0 * pu;
    } else if (pu.norm() > 1e-12 * u.norm()) {
      throw Error(ErrorKind::singular_symbol, "symbol undefined at 0 and input has a kernel component");
    }
  }
  return out;
}

GridFunction apply_function(const SpectralFactorization& f, const MultiplierSpec& m, const GridFunction& g) {
  return f.op().extend(apply_function(f, m, f.op().restrict(g)));
}

// ---------------------------------------------------------------------------
// Resolvent (Balakrishnan) quadrature

ResolventQuadrature::ResolventQuadrature(const DiscreteOperator& op) {
  if (op.kernel_dim() > 0) {
    throw Error(ErrorKind::domain, "resolvent quadrature needs a kernel-free operator");
  }
  Eigen::ComplexSchur<CMatrix> schur(op.matrix());
  q_ = schur.matrixU();
  t_ = schur.matrixT();
  const CVector diag = t_.diagonal();
  min_modulus_ = diag.cwiseAbs().minCoeff();
  max_modulus_ = diag.cwiseAbs().maxCoeff();
  if (!(min_modulus_ > 0.0)) throw Error(ErrorKind::singular_symbol, "operator is singular");
}

CVector ResolventQuadrature::solve_shifted(cplx shift, const CVector& y) const {
  CMatrix shifted = t_;
  shifted.diagonal().array() += shift;
  return shifted.triangularView<Eigen::Upper>().solve(y);
}

CVector ResolventQuadrature::stieltjes(double gamma, const CVector& g, double tol) const {
  const CVector y = q_.adjoint() * g;
  const double s_lo = 1e-5 * min_modulus_;
  const double s_hi = 1e5 * max_modulus_;
  const double x_lo = std::log(s_lo);
  const double x_hi = std::log(s_hi);

  // Analytic tails from the Neumann series of (s + T)⁻¹.
  CVector tails = CVector::Zero(y.size());
  {
    CVector term = y;  // T^{-k-1} y
    for (int k = 0; k < 3; ++k) {
      term = t_.triangularView<Eigen::Upper>().solve(term);
      tails += ((k % 2 == 0 ? 1.0 : -1.0) * std::pow(s_lo, gamma + k) / (gamma + k)) * term;
    }
    term = y;  // T^k y
    for (int k = 0; k < 3; ++k) {
      if (k > 0) term = t_ * term;
      tails += ((k % 2 == 0 ? 1.0 : -1.0) * std::pow(s_hi, gamma - k - 1.0) / (k + 1.0 - gamma)) * term;
    }
  }

  auto integrate = [&](int panels) {
    constexpr int per_panel = 16;
    static const QuadratureRule gl = gauss_legendre(per_panel);
    const double width = (x_hi - x_lo) / panels;
    CVector sum = CVector::Zero(y.size());
    for (int p = 0; p < panels; ++p) {
      const double center = x_lo + (p + 0.5) * width;
      for (int k = 0; k < per_panel; ++k) {
        const double x = center + 0.5 * width * gl.nodes[k];
        const double s = std::exp(x);
        // ds = s dx; integrand s^{γ-1} (s + T)⁻¹ y ds = s^γ (s + T)⁻¹ y dx
        sum += (0.5 * width * gl.weights[k] * std::exp(gamma * x)) * solve_shifted(s, y);
      }
    }
    last_nodes_ = panels * per_panel;
    return sum;
  };

  int panels = std::max(8, static_cast<int>(std::ceil(x_hi - x_lo)));
  CVector previous = integrate(panels);
  double change = INFINITY;
  for (int level = 0; level < 5; ++level) {
    panels *= 2;
    CVector current = integrate(panels);
    change = (current - previous).norm() / std::max(current.norm(), 1e-300);
    previous = std::move(current);
    if (change <= tol) return q_ * (previous + tails);
  }
  throw Error(ErrorKind::accuracy, "resolvent quadrature did not converge", change);
}

CVector ResolventQuadrature::power(double alpha, const CVector& f, double tol) const {
  if (!(alpha > -1.0 && alpha < 1.0)) throw Error(ErrorKind::domain, "quadrature power needs |alpha| < 1", alpha);
  if (alpha == 0.0) return f;
  if (alpha > 0.0) {
    const CVector lf = q_ * (t_ * (q_.adjoint() * f));
    return (std::sin(alpha * pi) / pi) * stieltjes(alpha, lf, tol);
  }
  const double a = -alpha;
  return (std::sin(a * pi) / pi) * stieltjes(1.0 - a, f, tol);
}

CVector fractional_power_quadrature(const DiscreteOperator& op, double alpha, const CVector& f, double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::domain, "fractional power needs 0 < alpha < 1", alpha);
  return ResolventQuadrature(op).power(alpha, f, tol);
}

GridFunction fractional_power_quadrature(const DiscreteOperator& op, double alpha, const GridFunction& f,
                                         double tol) {
  return op.extend(fractional_power_quadrature(op, alpha, op.restrict(f), tol));
}

// ---------------------------------------------------------------------------
// Scans

std::vector<ContractivitySample> semigroup_contractivity_scan(const DiscreteOperator& op,
                                                              const std::vector<double>& t_samples) {
  std::vector<ContractivitySample> out;
  out.reserve(t_samples.size());
  for (double t : t_samples) {
    if (!(t >= 0.0)) throw Error(ErrorKind::domain, "semigroup time must be non-negative", t);
    const CMatrix e = (-t * op.matrix()).exp();
    Eigen::BDCSVD<CMatrix> svd(e);
    out.push_back({t, svd.singularValues()(0)});
  }
  return out;
}

bool ImaginaryPowerBound::theta_below_right_angle() const { return fitted_theta < pi / 2; }

ImaginaryPowerBound fit_envelope(std::vector<std::pair<double, double>> samples) {
  ImaginaryPowerBound out;
  out.samples = samples;
  if (samples.empty()) return out;
  // (|u|, log norm), keeping the largest log norm per |u|.
  std::vector<std::pair<double, double>> pts;
  for (const auto& [u, norm] : samples) pts.emplace_back(std::abs(u), std::log(norm));
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> uniq;
  for (const auto& p : pts) {
    if (!uniq.empty() && uniq.back().first == p.first) {
      uniq.back().second = std::max(uniq.back().second, p.second);
    } else {
      uniq.push_back(p);
    }
  }
  // Upper concave hull.
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : uniq) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  double mean = 0.0;
  for (const auto& p : pts) mean += p.first;
  mean /= static_cast<double>(pts.size());
  double slope = 0.0;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    if (hull[k].first <= mean && mean <= hull[k + 1].first) {
      slope = (hull[k + 1].second - hull[k].second) / (hull[k + 1].first - hull[k].first);
      break;
    }
  }
  slope = std::max(slope, 0.0);
  double intercept = -INFINITY;
  for (const auto& p : pts) intercept = std::max(intercept, p.second - slope * p.first);
  out.fitted_theta = slope;
  out.fitted_constant = std::exp(intercept);
  return out;
}

ImaginaryPowerBound imaginary_power_scan(const SpectralFactorization& f, const std::vector<double>& u_samples) {
  std::vector<std::pair<double, double>> samples;
  samples.reserve(u_samples.size());
  for (double u : u_samples) {
    const MultiplierSpec m = MultiplierSpec::imaginary(u);
    CMatrix power = f.right_eigenvectors() * symbol_values(f, m).asDiagonal() * f.inverse_eigenvectors();
    Eigen::BDCSVD<CMatrix> svd(power);
    samples.emplace_back(u, svd.singularValues()(0));
  }
  return fit_envelope(std::move(samples));
}

double square_function_probe(const SpectralFactorization& f, double gamma, const CVector& x) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::domain, "square function needs gamma > 0", gamma);
  if (x.size() != f.size()) throw Error(ErrorKind::dimension, "vector size does not match factorization");
  const RVector& w = f.op().weights();
  auto wnorm2 = [&](const CVector& v) { return (v.cwiseAbs2().array() * w.array()).sum(); };
  const double x2 = wnorm2(x);
  if (x2 == 0.0) return 0.0;

  const CVector c = f.inverse_eigenvectors() * x;
  const CVector& ev = f.eigenvalues();
  const double big = f.max_modulus();
  const double small = f.min_modulus();
  double ratio = INFINITY;  // min Re λ / |λ|
  for (Eigen::Index k = 0; k < ev.size(); ++k) ratio = std::min(ratio, ev(k).real() / std::abs(ev(k)));
  if (!(ratio > 0.0)) throw Error(ErrorKind::accuracy, "spectrum touches the imaginary axis; tails unbounded");

  // ‖V diag(ψ) c‖_w ≤ K max|ψ|
  const double k2 = w.maxCoeff() * f.right_eigenvectors().squaredNorm() * c.squaredNorm();
  const double budget = 1e-10 * x2;
  const double g2 = 2.0 * gamma;
  const double t_min = std::pow(g2 * budget / k2, 1.0 / g2) / big;
  // Γ(a, y) ≤ 2 y^{a-1} e^{-y} once y ≥ 2a + 2.
  double t_max = 1.0 / (ratio * small);
  double upper = INFINITY;
  for (int it = 0; it < 200; ++it) {
    const double y = 2.0 * ratio * small * t_max;
    if (y >= 2.0 * g2 + 2.0) {
      upper = k2 * std::pow(2.0 * ratio, -g2) * 2.0 * std::pow(y, g2 - 1.0) * std::exp(-y);
      if (upper <= budget) break;
    }
    t_max *= 1.5;
  }
  if (!(upper <= budget)) throw Error(ErrorKind::accuracy, "square function tail bound not reached", upper);

  const MultiplierSpec psi = MultiplierSpec::psi(gamma);
  auto integrand = [&](double tau) {
    const double t = std::exp(tau);
    CVector scaled(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) scaled(k) = psi(t * ev(k)) * c(k);
    return wnorm2(f.right_eigenvectors() * scaled);
  };
  const double lo = std::log(t_min);
  const double hi = std::log(t_max);
  constexpr int per_panel = 16;
  const QuadratureRule gl = gauss_legendre(per_panel);
  auto integrate = [&](int panels) {
    const double width = (hi - lo) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double center = lo + (p + 0.5) * width;
      for (int k = 0; k < per_panel; ++k) sum += 0.5 * width * gl.weights[k] * integrand(center + 0.5 * width * gl.nodes[k]);
    }
    return sum;
  };
  int panels = std::max(4, static_cast<int>(std::ceil(hi - lo)));
  double previous = integrate(panels);
  double change = INFINITY;
  for (int level = 0; level < 5; ++level) {
    panels *= 2;
    const double current = integrate(panels);
    change = std::abs(current - previous) / std::max(current, 1e-300);
    previous = current;
    if (change <= 1e-12) return std::sqrt(previous);
  }
  throw Error(ErrorKind::accuracy, "square function quadrature did not converge", change);
}

std::vector<double> default_time_grid(const SpectralFactorization& f, int count) {
  return logspace(1e-4 / f.max_modulus(), 1e4 / f.min_modulus(), count);
}

}  // namespace pellip
