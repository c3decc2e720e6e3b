#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pellip/calculus.hpp"
#include "pellip/grid.hpp"
#include "pellip/linalg.hpp"

namespace pellip {

/// Sup over a finite log-grid of times, taken node by node.
struct MaximalScan {
  enum class Which { single, ergodic, difference, two_parameter };

  Which which = Which::single;
  std::vector<double> t_grid;
  std::vector<double> w_grid;  // two-parameter scans only
  GridFunction per_node_sup;
  double p = 2.0;
  double ratio = 0.0;  // ‖sup‖_p / ‖f‖_p

  // Same scan on the doubled grid, and |refined - ratio| / max(ratio, tiny).
  double refined_ratio = 0.0;
  double grid_sensitivity = 0.0;

  // Difference scans: max over nodes of M^A f - M^B f - M^{A,B} f (≤ 0 when the split holds).
  std::optional<double> split_violation;
  // Two-parameter scans with real A₁: max over (w, t, x) of |T_w T_t f| - T_w(M^{A₂} f), over ‖f‖_∞.
  std::optional<double> domination_violation;
};

const char* to_string(MaximalScan::Which which);

/// 60 per decade over [1e-4/|λ|max, 1e4/|λ|min].
std::vector<double> maximal_time_grid(const SpectralFactorization& f, int per_decade = 60);

/// Columns m(t_k L) u for every t in the grid (unknown-vector coordinates).
CMatrix function_orbit(const SpectralFactorization& f, const CVector& u, const std::vector<double>& t_grid,
                       const std::function<MultiplierSpec(double)>& symbol_at);
CMatrix semigroup_orbit(const SpectralFactorization& f, const CVector& u, const std::vector<double>& t_grid);

MaximalScan maximal_scan(const SpectralFactorization& f, const GridFunction& g, double p,
                         const std::vector<double>& t_grid, bool refine = true);
MaximalScan maximal_scan(const DiscreteOperator& op, const GridFunction& g, double p,
                         const std::vector<double>& t_grid);

MaximalScan ergodic_scan(const SpectralFactorization& f, const GridFunction& g, double p,
                         const std::vector<double>& t_grid, bool refine = true);

/// Residual T_t f - A_t f + (1/t)∫_0^t ψ₁(sL) f ds, with the ψ₁ integral by
/// Gauss–Legendre on `n_quad` nodes; relative to ‖f‖.
double ergodic_comparison_residual(const SpectralFactorization& f, const CVector& u, double t, int n_quad = 64);

MaximalScan difference_scan(const SpectralFactorization& fa, const SpectralFactorization& fb, const GridFunction& g,
                            double p, const std::vector<double>& t_grid, bool refine = true);

/// Relative residual of ∫_0^t T^B_s (L_B - L_A) T^A_{t-s} f ds against
/// T^A_t f - T^B_t f (absolute when the right side vanishes). Graded
/// Gauss–Legendre with `n_quad` nodes resolves the boundary layers at s = 0, t.
double duhamel_residual(const SpectralFactorization& fa, const SpectralFactorization& fb, const CVector& u,
                        double t, int n_quad);

/// Total mass of (w + s)^{α-1}(t - s)^{-α} ds over [0, t].
struct BetaMeasure {
  double alpha;
  double t;
  double w = 0.0;

  void validate() const;
  double density(double s) const;
  double mass(int n_quad = 512) const;
  /// π / sin(απ), the w = 0 mass.
  double exact_mass() const;
};

struct TransferNorm {
  double p;
  double u_norm;
  double v_norm;
};

struct AlphaSample {
  double alpha;
  double u_norm2;
  double v_norm2;
  double dual_path_error;  // spectral vs resolvent-quadrature U f, relative
};

/// U^{B,A}_α = L_B^α L_A^{-α} and V^{B,A} = (U^{A*,B*}_α)* with diagnostics.
struct TransferPlan {
  double alpha = 0.25;
  SpectralFactorization a;
  SpectralFactorization b;
  CMatrix u_matrix;
  CMatrix v_matrix;
  std::vector<TransferNorm> norms;
  std::vector<AlphaSample> sweep;
  double sweep_sup_u = 0.0;
  double sweep_sup_v = 0.0;
};

/// Throws domain unless 0 < α < 1/2, dimension when the operators act on
/// different unknowns, domain when either operator has a kernel.
/// `sweep_alphas` empty skips the α-sweep; `dual_path` toggles the
/// resolvent-quadrature comparison inside the sweep.
TransferPlan build_transfer(const DiscreteOperator& la, const DiscreteOperator& lb, double alpha,
                            const std::vector<double>& p_samples, const std::vector<double>& sweep_alphas = {},
                            bool dual_path = true, std::uint64_t seed = 1);

struct TransferIdentities {
  double u_residual;  // ‖U L_A^α f - L_B^α f‖ / ‖L_B^α f‖
  double v_residual;  // ‖L_B^α V f - L_A^α f‖ / ‖L_A^α f‖
};

TransferIdentities transfer_identities(const TransferPlan& plan, const CVector& u);

struct DuhamelTerms {
  CVector first;   // I_t(f)
  CVector second;  // II_t(f)
};

/// Factorized Duhamel terms with Gauss–Jacobi endpoint panels for the beta
/// densities. Throws accuracy when I_t - II_t misses T^A_t f - T^B_t f by
/// more than `tol` relative.
DuhamelTerms duhamel_factorized(const TransferPlan& plan, const CVector& u, double t, int n_quad,
                                double tol = 1e-6);

/// ∫ L_B T^B_s T^A_{t-s} f ds and ∫ T^B_s L_A T^A_{t-s} f ds on a graded
/// Gauss–Legendre rule, without any fractional powers.
DuhamelTerms duhamel_direct_terms(const SpectralFactorization& fa, const SpectralFactorization& fb,
                                  const CVector& u, double t, int n_quad);

/// Sup of |T^{A₁}_w T^{A₂}_t f| over the (w, t) grid. The domination check
/// runs when A₁ is real.
MaximalScan two_parameter_scan(const SpectralFactorization& f1, const SpectralFactorization& f2,
                               const GridFunction& g, double p, const std::vector<double>& w_grid,
                               const std::vector<double>& t_grid, bool refine = true);

/// 20 per decade over the joint spectral range of both operators.
std::vector<double> two_parameter_grid(const SpectralFactorization& f1, const SpectralFactorization& f2,
                                       int per_decade = 20);

struct NormEstimate {
  double initial_max = 0.0;  // max ratio over the family
  double estimate = 0.0;     // after greedy refinement
  int accepted_steps = 0;
  std::vector<double> history;  // best ratio after each step, nondecreasing
  CVector worst;                // maximizing unknown vector
};

/// Lower bound for the operator norm of u ↦ sup-function: start at the worst
/// member of `family` (at least 20), then `steps` random perturbations in the
/// span of `directions` (columns), kept only when the ratio improves.
NormEstimate operator_norm_estimate(const std::function<double(const CVector&)>& ratio_of,
                                    const std::vector<CVector>& family, const CMatrix& directions,
                                    int steps = 200, std::uint64_t seed = 7, double step_size = 0.3);

/// Lower estimate of the ℓ^p → ℓ^p norm (unweighted): duality-map power
/// iteration from several starts plus random trial vectors.
double matrix_p_norm_estimate(const CMatrix& m, double p, std::uint64_t seed = 3, int trials = 20);

}  // namespace pellip
