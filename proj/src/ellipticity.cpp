#include "pellip/ellipticity.hpp"

#include <cmath>

#include "pellip/error.hpp"

namespace pellip {

namespace {

void require_square(const CMatrix& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw Error(ErrorKind::dimension, "coefficient matrix must be square and non-empty");
  }
  if (!a.allFinite()) {
    throw Error(ErrorKind::domain, "coefficient matrix has non-finite entries");
  }
}

double min_eigenvalue(const RMatrix& q) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(q, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::domain: return "domain";
    case ErrorKind::not_elliptic: return "not-elliptic";
    case ErrorKind::ill_conditioned: return "ill-conditioned-diagonalization";
    case ErrorKind::singular_symbol: return "singular-symbol";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::divergent_bound: return "divergent-bound";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

double mu_of(double p) {
  if (!(p > 1.0)) throw Error(ErrorKind::domain, "exponent p must lie in (1, inf)", p);
  if (std::isinf(p)) return 1.0;
  return std::abs(1.0 - 2.0 / p);
}

double conjugate_exponent(double p) {
  if (!(p > 1.0)) throw Error(ErrorKind::domain, "exponent p must lie in (1, inf)", p);
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double lambda_of(const CMatrix& a) {
  require_square(a);
  const CMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double capital_lambda_of(const CMatrix& a) {
  require_square(a);
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

RMatrix p_ellipticity_form(const CMatrix& a, double mu) {
  require_square(a);
  const Eigen::Index d = a.rows();
  const RMatrix r = a.real();
  const RMatrix s = a.imag();
  // Re ξ*Aξ   ↦ [[R, -S], [S, R]]
  // Re ξᵀAξ   ↦ [[R, -S], [-S, -R]]
  RMatrix q0(2 * d, 2 * d);
  q0 << r, -s, s, r;
  RMatrix q1(2 * d, 2 * d);
  q1 << r, -s, -s, -r;
  const RMatrix q = q0 + mu * q1;
  return 0.5 * (q + q.transpose());
}

double delta_mu(const CMatrix& a, double mu) {
  return min_eigenvalue(p_ellipticity_form(a, mu));
}

double delta_p(const CMatrix& a, double p) { return delta_mu(a, mu_of(p)); }

PRange p_ellipticity_range(const CMatrix& a, double tol) {
  const double lambda = lambda_of(a);
  if (lambda <= 0.0) {
    throw Error(ErrorKind::not_elliptic, "lambda(A) <= 0, no p-ellipticity range", lambda);
  }
  PRange range;
  const double scale = std::max(1.0, capital_lambda_of(a));
  if (delta_mu(a, 1.0) >= -tol * scale) {
    return range;  // positive on all of [0, 1)
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (delta_mu(a, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return p_range_from_mu(0.5 * (lo + hi));
}

PRange p_range_from_mu(double mu_star) {
  PRange range;
  if (mu_star >= 1.0) return range;
  range.mu_star = mu_star;
  range.p_max = 2.0 / (1.0 - mu_star);
  range.p_min = 2.0 / (1.0 + mu_star);
  return range;
}

SobolevExponents sobolev_exponents(int d, double p) {
  if (d < 3) throw Error(ErrorKind::domain, "Sobolev exponents need d >= 3", d);
  if (!(p >= 2.0)) throw Error(ErrorKind::domain, "Sobolev exponents need p >= 2", p);
  SobolevExponents e;
  e.d = d;
  e.p = p;
  e.two_star = 2.0 * d / (d - 2.0);
  e.p_upper = p * d / (d - 2.0);
  e.p_lower = e.p_upper / (e.p_upper - 1.0);
  return e;
}

}  // namespace pellip
