#pragma once

// Reference computations that do not share code paths with the library.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pellip/calculus.hpp"
#include "pellip/linalg.hpp"

namespace oracle {

using pellip::CMatrix;
using pellip::cplx;
using pellip::CVector;

/// Re⟨Aξ, ξ + μ ξ̄⟩ straight from the definition.
inline double form(const CMatrix& a, const CVector& xi, double mu) {
  const CVector ax = a * xi;
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) s += ax(i) * (std::conj(xi(i)) + mu * xi(i));
  return s.real();
}

/// Minimum of the form over the unit sphere of ℂ^d: the best of `samples`
/// uniform points, then refined by Rayleigh–Ritz on span{x, gradient, previous
/// step} (real inner product Re⟨·,·⟩). Everything is built from evaluations
/// of `form` through polarization, never from a matrix of the form.
struct SphereSamples {
  std::vector<CVector> points;
};

inline SphereSamples sphere_samples(int d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SphereSamples s;
  s.points.reserve(count);
  for (int k = 0; k < count; ++k) {
    CVector x(d);
    for (int i = 0; i < d; ++i) x(i) = cplx(normal(rng), normal(rng));
    s.points.push_back(x / x.norm());
  }
  return s;
}

// Symmetric bilinear form behind `form`.
inline double bilinear(const CMatrix& a, double mu, const CVector& x, const CVector& y) {
  return 0.25 * (form(a, x + y, mu) - form(a, x - y, mu));
}

inline double polish(const CMatrix& a, double mu, CVector x, int iterations = 100) {
  const int d = static_cast<int>(x.size());
  CVector prev = CVector::Zero(d);
  double fx = form(a, x, mu);
  for (int it = 0; it < iterations; ++it) {
    CVector g(d);
    for (int i = 0; i < d; ++i) {
      const CVector re = CVector::Unit(d, i);
      const CVector im = cplx(0.0, 1.0) * re;
      g(i) = cplx(2 * bilinear(a, mu, x, re), 2 * bilinear(a, mu, x, im));
    }
    // Real Gram–Schmidt of {x, g, prev}.
    std::vector<CVector> basis{x};
    for (const CVector* v : {&g, &prev}) {
      CVector w = *v;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) w -= b.dot(w).real() * b;
      if (w.norm() > 1e-10 * std::max(1.0, v->norm())) basis.push_back(w / w.norm());
    }
    const int m = static_cast<int>(basis.size());
    if (m == 1) break;
    Eigen::MatrixXd q(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) q(i, j) = bilinear(a, mu, basis[i], basis[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q + q.transpose()));
    CVector y = CVector::Zero(d);
    for (int i = 0; i < m; ++i) y += es.eigenvectors()(i, 0) * basis[i];
    y /= y.norm();
    const double fy = form(a, y, mu);
    prev = y - x;
    x = y;
    if (fx - fy < 1e-15 && it > 2) {
      fx = std::min(fx, fy);
      break;
    }
    fx = fy;
  }
  return fx;
}

/// Sampled minimum with polishing of the best few samples.
inline double sphere_delta(const CMatrix& a, double mu, const SphereSamples& s, int polish_count = 4) {
  std::vector<std::pair<double, int>> values;
  values.reserve(s.points.size());
  for (std::size_t k = 0; k < s.points.size(); ++k) values.push_back({form(a, s.points[k], mu), static_cast<int>(k)});
  std::partial_sort(values.begin(), values.begin() + polish_count, values.end());
  double best = values.front().first;
  for (int k = 0; k < polish_count; ++k) best = std::min(best, polish(a, mu, s.points[values[k].second]));
  return best;
}

/// ∫_0^t e^{-s b} e^{-(t-s) a} ds.
inline cplx exp_divided_difference(cplx a, cplx b, double t) {
  const cplx z = t * (b - a);
  if (std::abs(z) < 1e-3) {
    // t e^{-ta} (1 - e^{-z}) / z
    return t * std::exp(-t * a) * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0);
  }
  return (std::exp(-t * a) - std::exp(-t * b)) / (b - a);
}

/// Exact ∫_0^t L_B T^B_s T^A_{t-s} f ds (first) and ∫_0^t T^B_s L_A T^A_{t-s} f ds
/// (second) in eigen-coordinates of both operators.
inline std::pair<CVector, CVector> duhamel_terms(const pellip::SpectralFactorization& fa,
                                                 const pellip::SpectralFactorization& fb, const CVector& u,
                                                 double t) {
  const CVector ca = fa.inverse_eigenvectors() * u;
  const CMatrix m = fb.inverse_eigenvectors() * fa.right_eigenvectors();
  const CVector& la = fa.eigenvalues();
  const CVector& lb = fb.eigenvalues();
  CVector first = CVector::Zero(lb.size()), second = CVector::Zero(lb.size());
  for (Eigen::Index j = 0; j < lb.size(); ++j) {
    for (Eigen::Index k = 0; k < la.size(); ++k) {
      const cplx phi = exp_divided_difference(la(k), lb(j), t) * m(j, k) * ca(k);
      first(j) += lb(j) * phi;
      second(j) += la(k) * phi;
    }
  }
  return {fb.right_eigenvectors() * first, fb.right_eigenvectors() * second};
}

/// Eigenvalue k (1-based) of a·(1/h²) tridiag(-1, 2, -1) on `cells` cells of [0, length].
inline double dirichlet_eigenvalue(int cells, double length, int k, double a = 1.0) {
  const double h = length / cells;
  const double s = std::sin(k * M_PI * h / (2 * length));
  return 4 * a * s * s / (h * h);
}

/// ∫_0^∞ m(λ) λ^{-iu} dλ/λ by composite Simpson in x = log λ.
template <class M>
cplx mellin_simpson(M&& m, double u, double x_lo, double x_hi, int panels) {
  const double h = (x_hi - x_lo) / (2 * panels);
  cplx sum = 0.0;
  for (int k = 0; k <= 2 * panels; ++k) {
    const double x = x_lo + k * h;
    const double w = (k == 0 || k == 2 * panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * m(std::exp(x)) * std::polar(1.0, -u * x);
  }
  return sum * h / 3.0;
}

}  // namespace oracle
