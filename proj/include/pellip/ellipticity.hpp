#pragma once

#include <limits>

#include "pellip/linalg.hpp"

namespace pellip {

/// Open interval (p_min, p_max) of exponents for which Δ_p(A) > 0.
/// `mu_star` is the critical value of |1 - 2/p|; p_max is +inf when mu_star >= 1.
struct PRange {
  double p_min = 1.0;
  double p_max = std::numeric_limits<double>::infinity();
  double mu_star = 1.0;

  bool contains(double p) const { return p > p_min && p < p_max; }
};

struct SobolevExponents {
  int d = 3;
  double p = 2.0;
  double two_star = 6.0;
  double p_upper = 6.0;
  double p_lower = 1.2;
};

/// |1 - 2/p|, the parameter that enters the p-ellipticity quadratic form.
double mu_of(double p);

/// Conjugate exponent p' with 1/p + 1/p' = 1.
double conjugate_exponent(double p);

/// min over unit ξ of Re⟨Aξ, ξ⟩: smallest eigenvalue of the Hermitian part.
double lambda_of(const CMatrix& a);

/// Spectral norm of A, the smallest admissible boundedness constant.
double capital_lambda_of(const CMatrix& a);

/// Symmetric 2d×2d matrix Q_μ with ξ = u + iv and
/// [u;v]ᵀ Q_μ [u;v] = Re⟨Aξ, ξ + μ ξ̄⟩.
RMatrix p_ellipticity_form(const CMatrix& a, double mu);

/// Δ_p(A) = min over unit ξ of Re⟨Aξ, ξ + |1-2/p| ξ̄⟩, computed exactly as
/// the smallest eigenvalue of p_ellipticity_form(A, |1-2/p|).
double delta_p(const CMatrix& a, double p);

/// Same quantity parametrised directly by μ ∈ [0, 1].
double delta_mu(const CMatrix& a, double mu);

/// Bisection on μ; valid because μ ↦ λ_min(Q_μ) is concave.
PRange p_ellipticity_range(const CMatrix& a, double tol = 1e-8);

/// (2/(1+μ*), 2/(1-μ*)), the whole of (1, ∞) when μ* ≥ 1.
PRange p_range_from_mu(double mu_star);

SobolevExponents sobolev_exponents(int d, double p);

}  // namespace pellip
