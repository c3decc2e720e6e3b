#pragma once

#include <optional>
#include <vector>

#include "pellip/discretize.hpp"
#include "pellip/linalg.hpp"

namespace pellip {

/// Scalar symbols m(λ) of the functional calculus. All symbols are evaluated
/// at t·λ where `time_scale` = t.
struct MultiplierSpec {
  enum class Kind {
    exp,               // e^{-z}
    psi_beta,          // z^β e^{-z}
    m_theta,           // e^{-e^{±iθ} z} - e^{-z}
    imaginary_power,   // z^{iu}
    fractional_power,  // z^α, α complex
    ergodic_average,   // (1 - e^{-z}) / z
  };

  Kind kind = Kind::exp;
  double beta = 1.0;
  double theta = 0.0;
  int sign = 1;
  double u = 0.0;
  cplx alpha = 0.5;
  double time_scale = 1.0;

  static MultiplierSpec semigroup(double t);
  static MultiplierSpec psi(double beta, double t = 1.0);
  static MultiplierSpec rotation_difference(double theta, int sign, double t = 1.0);
  static MultiplierSpec imaginary(double u);
  static MultiplierSpec power(cplx alpha, double t = 1.0);
  static MultiplierSpec ergodic(double t);

  /// m(t λ); principal branch for powers.
  cplx operator()(cplx lambda) const;
  /// Limit at λ = 0, empty when the symbol is singular there.
  std::optional<cplx> at_zero() const;

  void validate() const;
};

/// Eigen-decomposition L = V Λ V⁻¹ on the complement of the kernel. With a
/// kernel (pure Neumann) V is N×(N-k) and `kernel_projector` is the orthogonal
/// projector onto constants, so L = V Λ V⁻¹ exactly and f(L) = V f(Λ) V⁻¹ + f(0) P.
class SpectralFactorization {
 public:
  const CVector& eigenvalues() const { return eigenvalues_; }
  const CMatrix& right_eigenvectors() const { return v_; }
  const CMatrix& inverse_eigenvectors() const { return v_inv_; }
  double condition_number() const { return condition_number_; }
  double reconstruction_residual() const { return residual_; }
  int kernel_dim() const { return kernel_dim_; }
  const CMatrix& kernel_projector() const { return kernel_projector_; }
  Eigen::Index size() const { return v_.rows(); }
  const DiscreteOperator& op() const { return op_; }

  double min_modulus() const;
  double max_modulus() const;
  /// max |arg λ| over the spectrum.
  double max_argument() const;

  /// V diag(m) V⁻¹ + m0 P as a dense matrix.
  CMatrix function_matrix(const CVector& symbol_values, std::optional<cplx> at_zero) const;
  CMatrix function_matrix(const MultiplierSpec& m) const;

 private:
  friend SpectralFactorization factorize(const DiscreteOperator& op, double max_condition);

  DiscreteOperator op_;
  CVector eigenvalues_;
  CMatrix v_;
  CMatrix v_inv_;
  CMatrix kernel_projector_;
  int kernel_dim_ = 0;
  double condition_number_ = 1.0;
  double residual_ = 0.0;
};

/// Dense eigendecomposition with condition and reconstruction checks.
/// Throws ill_conditioned when cond(V) > max_condition, accuracy when the
/// relative reconstruction residual exceeds 1e-8.
SpectralFactorization factorize(const DiscreteOperator& op, double max_condition = 1e10);

/// V m(Λ) V⁻¹ u (+ m(0) P u) on unknown vectors.
CVector apply_function(const SpectralFactorization& f, const MultiplierSpec& m, const CVector& u);
GridFunction apply_function(const SpectralFactorization& f, const MultiplierSpec& m, const GridFunction& g);

/// L^α f via (sin απ/π) ∫_0^∞ s^{α-1} (s + L)⁻¹ L f ds, trapezoid in log s
/// with analytic tail corrections, refined until two levels agree to `tol`.
/// Uses a Schur factorization of L, independent of the eigenvector path.
/// Negative α ∈ (-1, 0) evaluates L^{α} f = (sin |α|π/π) ∫ s^{-|α|} (s + L)⁻¹ f ds.
class ResolventQuadrature {
 public:
  explicit ResolventQuadrature(const DiscreteOperator& op);
  CVector power(double alpha, const CVector& f, double tol = 1e-11) const;
  /// Number of trapezoid nodes used by the last converged evaluation.
  int last_nodes() const { return last_nodes_; }

 private:
  /// ∫_0^∞ s^{γ-1} (s + L)⁻¹ g ds for γ ∈ (0, 1).
  CVector stieltjes(double gamma, const CVector& g, double tol) const;
  CVector solve_shifted(cplx shift, const CVector& y) const;  // (shift + T)⁻¹ y in Schur coordinates

  CMatrix q_;
  CMatrix t_;
  double min_modulus_ = 1.0;
  double max_modulus_ = 1.0;
  mutable int last_nodes_ = 0;
};

CVector fractional_power_quadrature(const DiscreteOperator& op, double alpha, const CVector& f,
                                    double tol = 1e-11);
GridFunction fractional_power_quadrature(const DiscreteOperator& op, double alpha, const GridFunction& f,
                                         double tol = 1e-11);

struct ContractivitySample {
  double t;
  double norm;
};

/// ‖e^{-tL}‖₂ via scaling-and-squaring exponentials and singular values.
std::vector<ContractivitySample> semigroup_contractivity_scan(const DiscreteOperator& op,
                                                              const std::vector<double>& t_samples);

struct ImaginaryPowerBound {
  std::vector<std::pair<double, double>> samples;  // (u, ‖L^{iu}‖₂)
  double fitted_theta = 0.0;
  double fitted_constant = 1.0;
  bool theta_below_right_angle() const;
};

/// Fits the least upper envelope log‖L^{iu}‖ ≤ log C + θ|u| (the supporting
/// line of the upper hull at the mean |u|, slope clamped at 0).
ImaginaryPowerBound imaginary_power_scan(const SpectralFactorization& f, const std::vector<double>& u_samples);
ImaginaryPowerBound fit_envelope(std::vector<std::pair<double, double>> samples);

/// G(x) = (∫_0^∞ ‖ψ_γ(tL)x‖² dt/t)^{1/2} in the weighted L² norm.
double square_function_probe(const SpectralFactorization& f, double gamma, const CVector& x);

/// Default logarithmic time grid [1e-4/|λ|max, 1e4/|λ|min] with `count` points.
std::vector<double> default_time_grid(const SpectralFactorization& f, int count = 200);

}  // namespace pellip
