#pragma once

#include <iosfwd>
#include <vector>

#include "pellip/calculus.hpp"
#include "pellip/linalg.hpp"

namespace pellip {

/// [𝓜ψ_α](u) = Γ(α - iu).
cplx mellin_psi(double alpha, double u);

/// [𝓜m_{±θ}](u) = iθ ((e^{∓θu} - 1)/(θu)) Γ(1 - iu); the bracket is -sign at u = 0.
cplx mellin_m_theta(double theta, int sign, double u);

/// Mellin transform of a symbol supported by Cowling reconstruction.
cplx mellin_transform(const MultiplierSpec& symbol, double u);

/// log |𝓜m(u)|, finite for |u| far beyond where 𝓜m itself underflows.
double log_abs_mellin(const MultiplierSpec& symbol, double u);

/// Exponential decay rate of |𝓜m|: π/2 for ψ_β, π/2 - θ for m_θ.
double mellin_decay_rate(const MultiplierSpec& symbol);

/// √(2π) (1 + |u|)^{α - 1/2} e^{-π|u|/2}.
double stirling_envelope(double alpha, double u);

/// Brute-force ∫_0^∞ m(λ) λ^{-iu} dλ/λ by trapezoid in log λ.
cplx mellin_quadrature(const MultiplierSpec& symbol, double u, double step = 0.01);

/// Sampled 𝓜m on a uniform trapezoid grid over [-U, U], reusable at any t.
struct MellinTable {
  MultiplierSpec symbol;
  std::vector<double> u_samples;
  std::vector<double> weights;  // trapezoid weights
  std::vector<cplx> values;
  double truncation_u = 0.0;
  double tail_bound = 0.0;  // ∫_{|u|>U} |𝓜m(u)| du
};

MellinTable make_mellin_table(const MultiplierSpec& symbol, double truncation_u = 60.0, int n_quad = 4000);

void write_csv(std::ostream& out, const MellinTable& table);

/// (1/2π) ∫_{-U}^{U} t^{iu} [𝓜m](u) L^{iu} f du on the kernel-free subspace.
/// When `tol` > 0, throws truncation (value = suggested U) if the estimated
/// tail, cond(V) ‖f‖ (1/2π) ∫_{|u|>U} |𝓜m| e^{φ|u|} with φ = max|arg λ|,
/// exceeds tol ‖f‖.
CVector cowling_reconstruct(const SpectralFactorization& f, const MellinTable& table, double t, const CVector& u,
                            double tol = 1e-8);
CVector cowling_reconstruct(const SpectralFactorization& f, const MultiplierSpec& symbol, double t,
                            const CVector& u, double truncation_u = 60.0, int n_quad = 4000, double tol = 1e-8);

/// (1/2π) ∫ |𝓜m(u)| C e^{θ|u|} du for the fitted imaginary-power envelope.
/// Throws divergent_bound when θ is not below the decay rate of |𝓜m|.
double subordination_bound(const MultiplierSpec& symbol, const ImaginaryPowerBound& ipb, double step = 0.01);

}  // namespace pellip
