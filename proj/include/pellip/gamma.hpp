#pragma once

#include "pellip/linalg.hpp"

namespace pellip {

/// A logarithm of Γ(z) (imaginary part defined modulo 2π) for z off the
/// non-positive real axis.
/// Lanczos approximation with g = 671/128 and 14 coefficients (the set
/// published in Numerical Recipes, 3rd ed.), reflection for Re z < 1/2.
/// Relative accuracy of exp(log_gamma) is better than 1e-12 for
/// Re z ∈ (0, 2], |Im z| ≤ 100.
cplx log_gamma(cplx z);

/// Γ(z) = exp(log Γ(z)).
cplx complex_gamma(cplx z);

}  // namespace pellip
