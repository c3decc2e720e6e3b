#include "pellip/maximal.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pellip/error.hpp"
#include "pellip/quadrature.hpp"

namespace pellip {

namespace {

constexpr double tiny = 1e-300;

RVector row_sup_abs(const CMatrix& orbit) {
  RVector sup = RVector::Zero(orbit.rows());
  if (orbit.cols() > 0) sup = orbit.cwiseAbs().rowwise().maxCoeff();
  return sup;
}

GridFunction as_grid_function(const DiscreteOperator& op, const RVector& values) {
  return op.extend(values.cast<cplx>());
}

double ratio_of(const DiscreteOperator& op, const RVector& sup, const CVector& u, double p) {
  const double denom = lp_norm(op.extend(u), p);
  if (denom == 0.0) return 0.0;
  return lp_norm(as_grid_function(op, sup), p) / denom;
}

void finish_refinement(MaximalScan& scan, double refined) {
  scan.refined_ratio = refined;
  scan.grid_sensitivity = std::abs(refined - scan.ratio) / std::max(scan.ratio, tiny);
}

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw Error(ErrorKind::domain, "time grid is empty");
  for (double t : t_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::domain, "time samples must be positive and finite", t);
  }
  if (!std::is_sorted(t_grid.begin(), t_grid.end(), std::less_equal<>())) {
    throw Error(ErrorKind::domain, "time samples must be strictly increasing");
  }
}

void check_pair(const SpectralFactorization& fa, const SpectralFactorization& fb) {
  if (!fa.op().compatible(fb.op())) {
    throw Error(ErrorKind::grid_mismatch, "operators live on different grids or boundary conditions");
  }
}

/// V_B Σ_j w_j m(λ, s_j) ∘ (V_B⁻¹ Y)_j, plus m0 P Σ_j w_j Y_j on a kernel.
CVector weighted_outer_sum(const SpectralFactorization& f, const CMatrix& y, const QuadratureRule& rule,
                           const std::function<cplx(cplx, double)>& symbol, std::optional<cplx> at_zero) {
  const CMatrix c = f.inverse_eigenvectors() * y;
  const CVector& ev = f.eigenvalues();
  CVector acc = CVector::Zero(c.rows());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index k = 0; k < c.rows(); ++k) acc(k) += rule.weights[j] * symbol(ev(k), rule.nodes[j]) * c(k, j);
  }
  CVector out = f.right_eigenvectors() * acc;
  if (f.kernel_dim() > 0 && at_zero && *at_zero != 0.0) {
    CVector sum = CVector::Zero(y.rows());
    for (Eigen::Index j = 0; j < y.cols(); ++j) sum += rule.weights[j] * y.col(j);
    out += *at_zero * (f.kernel_projector() * sum);
  }
  return out;
}

std::vector<double> remaining_times(const QuadratureRule& rule, double t) {
  std::vector<double> rest(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) rest[j] = t - rule.nodes[j];
  return rest;
}

CVector exp_apply(const SpectralFactorization& f, const CVector& u, double t) {
  return apply_function(f, MultiplierSpec::semigroup(t), u);
}

}  // namespace

const char* to_string(MaximalScan::Which which) {
  switch (which) {
    case MaximalScan::Which::single: return "single";
    case MaximalScan::Which::ergodic: return "ergodic";
    case MaximalScan::Which::difference: return "difference";
    case MaximalScan::Which::two_parameter: return "two_parameter";
  }
  return "unknown";
}

std::vector<double> maximal_time_grid(const SpectralFactorization& f, int per_decade) {
  return log_grid(1e-4 / f.max_modulus(), 1e4 / f.min_modulus(), per_decade);
}

CMatrix function_orbit(const SpectralFactorization& f, const CVector& u, const std::vector<double>& t_grid,
                       const std::function<MultiplierSpec(double)>& symbol_at) {
  if (u.size() != f.size()) throw Error(ErrorKind::dimension, "vector size does not match factorization");
  const CVector c = f.inverse_eigenvectors() * u;
  const CVector& ev = f.eigenvalues();
  const Eigen::Index n = static_cast<Eigen::Index>(t_grid.size());
  CMatrix scaled(c.size(), n);
  CVector kernel_part;
  if (f.kernel_dim() > 0) kernel_part = f.kernel_projector() * u;
  std::vector<cplx> at_zero(n, cplx(0.0));
  for (Eigen::Index j = 0; j < n; ++j) {
    const MultiplierSpec m = symbol_at(t_grid[j]);
    for (Eigen::Index k = 0; k < c.size(); ++k) scaled(k, j) = m(ev(k)) * c(k);
    if (f.kernel_dim() > 0) {
      const auto m0 = m.at_zero();
      if (!m0) throw Error(ErrorKind::singular_symbol, "symbol undefined on the kernel");
      at_zero[j] = *m0;
    }
  }
  CMatrix out = f.right_eigenvectors() * scaled;
  if (f.kernel_dim() > 0) {
    for (Eigen::Index j = 0; j < n; ++j) out.col(j) += at_zero[j] * kernel_part;
  }
  return out;
}

CMatrix semigroup_orbit(const SpectralFactorization& f, const CVector& u, const std::vector<double>& t_grid) {
  return function_orbit(f, u, t_grid, [](double t) { return MultiplierSpec::semigroup(t); });
}

MaximalScan maximal_scan(const SpectralFactorization& f, const GridFunction& g, double p,
                         const std::vector<double>& t_grid, bool refine) {
  check_grid(t_grid);
  const DiscreteOperator& op = f.op();
  const CVector u = op.restrict(g);
  MaximalScan scan;
  scan.which = MaximalScan::Which::single;
  scan.t_grid = t_grid;
  scan.p = p;
  const RVector sup = row_sup_abs(semigroup_orbit(f, u, t_grid));
  scan.per_node_sup = as_grid_function(op, sup);
  scan.ratio = ratio_of(op, sup, u, p);
  if (refine) {
    finish_refinement(scan, maximal_scan(f, g, p, refine_log_grid(t_grid), false).ratio);
  }
  return scan;
}

MaximalScan maximal_scan(const DiscreteOperator& op, const GridFunction& g, double p,
                         const std::vector<double>& t_grid) {
  return maximal_scan(factorize(op), g, p, t_grid);
}

MaximalScan ergodic_scan(const SpectralFactorization& f, const GridFunction& g, double p,
                         const std::vector<double>& t_grid, bool refine) {
  check_grid(t_grid);
  const DiscreteOperator& op = f.op();
  const CVector u = op.restrict(g);
  MaximalScan scan;
  scan.which = MaximalScan::Which::ergodic;
  scan.t_grid = t_grid;
  scan.p = p;
  const RVector sup =
      row_sup_abs(function_orbit(f, u, t_grid, [](double t) { return MultiplierSpec::ergodic(t); }));
  scan.per_node_sup = as_grid_function(op, sup);
  scan.ratio = ratio_of(op, sup, u, p);
  if (refine) finish_refinement(scan, ergodic_scan(f, g, p, refine_log_grid(t_grid), false).ratio);
  return scan;
}

double ergodic_comparison_residual(const SpectralFactorization& f, const CVector& u, double t, int n_quad) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "time must be positive", t);
  const QuadratureRule rule = graded_beta_rule(t, 0.0, 0.0, n_quad);
  const CVector c = f.inverse_eigenvectors() * u;
  const CVector& ev = f.eigenvalues();
  // In eigen-coordinates every term is diagonal; the ψ₁ integral is a scalar quadrature per mode.
  CVector r(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const cplx z = t * ev(k);
    const cplx semigroup = std::exp(-z);
    const cplx average = MultiplierSpec::ergodic(t)(ev(k));
    const cplx psi_integral = rule.integrate([&](double s) { return s * ev(k) * std::exp(-s * ev(k)); }) / t;
    r(k) = (semigroup - average + psi_integral) * c(k);
  }
  // On the kernel all three terms are f, f and 0.
  const double denom = std::max(u.norm(), tiny);
  return (f.right_eigenvectors() * r).norm() / denom;
}

MaximalScan difference_scan(const SpectralFactorization& fa, const SpectralFactorization& fb, const GridFunction& g,
                            double p, const std::vector<double>& t_grid, bool refine) {
  check_grid(t_grid);
  check_pair(fa, fb);
  const DiscreteOperator& op = fa.op();
  const CVector u = op.restrict(g);
  const CMatrix ta = semigroup_orbit(fa, u, t_grid);
  const CMatrix tb = semigroup_orbit(fb, u, t_grid);
  const RVector sup = row_sup_abs(ta - tb);
  MaximalScan scan;
  scan.which = MaximalScan::Which::difference;
  scan.t_grid = t_grid;
  scan.p = p;
  scan.per_node_sup = as_grid_function(op, sup);
  scan.ratio = ratio_of(op, sup, u, p);
  const RVector ma = row_sup_abs(ta);
  const RVector mb = row_sup_abs(tb);
  scan.split_violation = (ma - mb - sup).maxCoeff();
  if (refine) finish_refinement(scan, difference_scan(fa, fb, g, p, refine_log_grid(t_grid), false).ratio);
  return scan;
}

double duhamel_residual(const SpectralFactorization& fa, const SpectralFactorization& fb, const CVector& u,
                        double t, int n_quad) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "time must be positive", t);
  check_pair(fa, fb);
  const QuadratureRule rule = graded_beta_rule(t, 0.0, 0.0, n_quad);
  std::vector<double> rest(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) rest[j] = t - rule.nodes[j];
  // X_j = T^A_{t-s_j} f, then (L_B - L_A) X_j, then the weighted T^B_{s_j} sum.
  const CMatrix x = semigroup_orbit(fa, u, rest);
  const CMatrix diff = fb.op().matrix() - fa.op().matrix();
  CMatrix c = fb.inverse_eigenvectors() * (diff * x);
  const CVector& evb = fb.eigenvalues();
  CVector acc = CVector::Zero(c.rows());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index k = 0; k < c.rows(); ++k) acc(k) += rule.weights[j] * std::exp(-rule.nodes[j] * evb(k)) * c(k, j);
  }
  CVector integral = fb.right_eigenvectors() * acc;
  if (fb.kernel_dim() > 0) {
    CVector kernel_sum = CVector::Zero(u.size());
    const CMatrix y = diff * x;
    for (Eigen::Index j = 0; j < y.cols(); ++j) kernel_sum += rule.weights[j] * y.col(j);
    integral += fb.kernel_projector() * kernel_sum;
  }
  const CVector exact = exp_apply(fa, u, t) - exp_apply(fb, u, t);
  const double scale = exact.norm();
  const double err = (integral - exact).norm();
  return scale > 1e-12 * std::max(u.norm(), tiny) ? err / scale : err;
}

void BetaMeasure::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::domain, "beta measure needs 0 < alpha < 1", alpha);
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "beta measure needs t > 0", t);
  if (!(w >= 0.0)) throw Error(ErrorKind::domain, "beta measure needs w >= 0", w);
}

double BetaMeasure::density(double s) const {
  return std::pow(w + s, alpha - 1.0) * std::pow(t - s, -alpha);
}

double BetaMeasure::mass(int n_quad) const {
  validate();
  const QuadratureRule rule = graded_shifted_beta_rule(t, w, alpha - 1.0, -alpha, n_quad);
  double sum = 0.0;
  for (double wk : rule.weights) sum += wk;
  return sum;
}

double BetaMeasure::exact_mass() const { return pi / std::sin(alpha * pi); }

double matrix_p_norm_estimate(const CMatrix& m, double p, std::uint64_t seed, int trials) {
  if (!(p >= 1.0)) throw Error(ErrorKind::domain, "p-norm needs p >= 1", p);
  if (m.size() == 0) return 0.0;
  if (p == 1.0) return m.cwiseAbs().colwise().sum().maxCoeff();
  if (std::isinf(p)) return m.cwiseAbs().rowwise().sum().maxCoeff();
  if (p == 2.0) return Eigen::BDCSVD<CMatrix>(m).singularValues()(0);

  const double q = p / (p - 1.0);
  auto vnorm = [](const CVector& v, double r) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), r);
    return std::pow(s, 1.0 / r);
  };
  // Dual vector: ‖d‖_{r'} = 1 and ⟨v, d⟩ = ‖v‖_r.
  auto dual = [&](const CVector& v, double r) {
    const double nv = vnorm(v, r);
    CVector d(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double a = std::abs(v(i));
      d(i) = a == 0.0 ? cplx(0.0) : std::pow(a / nv, r - 1.0) * v(i) / a;
    }
    return d;
  };
  auto ratio = [&](const CVector& x) {
    const double nx = vnorm(x, p);
    return nx == 0.0 ? 0.0 : vnorm(m * x, p) / nx;
  };

  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, vnorm(m.col(j), p));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_vector = [&] {
    CVector v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(normal(rng), normal(rng));
    return v;
  };
  for (int k = 0; k < trials; ++k) best = std::max(best, ratio(random_vector()));

  std::vector<CVector> starts{CVector::Ones(m.cols())};
  for (int k = 0; k < 3; ++k) starts.push_back(random_vector());
  for (CVector x : starts) {
    x /= vnorm(x, p);
    for (int it = 0; it < 100; ++it) {
      const CVector y = m * x;
      best = std::max(best, vnorm(y, p));
      if (y.norm() == 0.0) break;
      const CVector z = m.adjoint() * dual(y, p);
      if (vnorm(z, q) <= z.dot(x).real() * (1.0 + 1e-12)) break;
      x = dual(z, q);
    }
  }
  return best;
}

namespace {

CMatrix power_matrix(const SpectralFactorization& f, double alpha) {
  return f.function_matrix(MultiplierSpec::power(cplx(alpha, 0.0)));
}

DiscreteOperator adjoint_operator(const DiscreteOperator& op) { return assemble(op.field().adjoint(), op.bc()); }

}  // namespace

TransferPlan build_transfer(const DiscreteOperator& la, const DiscreteOperator& lb, double alpha,
                            const std::vector<double>& p_samples, const std::vector<double>& sweep_alphas,
                            bool dual_path, std::uint64_t seed) {
  auto check_alpha = [](double a) {
    if (!(a > 0.0 && a < 0.5)) throw Error(ErrorKind::domain, "transfer exponent must lie in (0, 1/2)", a);
  };
  check_alpha(alpha);
  for (double a : sweep_alphas) check_alpha(a);
  if (!la.compatible(lb)) throw Error(ErrorKind::grid_mismatch, "operators live on different grids or boundary conditions");
  if (la.kernel_dim() > 0 || lb.kernel_dim() > 0) {
    throw Error(ErrorKind::domain, "transfer operators need kernel-free operators (use a Dirichlet part)");
  }

  TransferPlan plan;
  plan.alpha = alpha;
  plan.a = factorize(la);
  plan.b = factorize(lb);
  const SpectralFactorization a_star = factorize(adjoint_operator(la));
  const SpectralFactorization b_star = factorize(adjoint_operator(lb));

  auto u_of = [&](double a) { return CMatrix(power_matrix(plan.b, a) * power_matrix(plan.a, -a)); };
  // V^{B,A} = (U^{A*,B*}_α)*, formed literally from the adjoint operators.
  auto v_of = [&](double a) { return CMatrix((power_matrix(a_star, a) * power_matrix(b_star, -a)).adjoint()); };

  plan.u_matrix = u_of(alpha);
  plan.v_matrix = v_of(alpha);
  for (double p : p_samples) {
    plan.norms.push_back({p, matrix_p_norm_estimate(plan.u_matrix, p, seed), matrix_p_norm_estimate(plan.v_matrix, p, seed)});
  }

  if (!sweep_alphas.empty()) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    CVector probe(la.size());
    for (Eigen::Index i = 0; i < probe.size(); ++i) probe(i) = cplx(normal(rng), normal(rng));
    std::optional<ResolventQuadrature> qa, qb;
    if (dual_path) {
      qa.emplace(la);
      qb.emplace(lb);
    }
    for (double a : sweep_alphas) {
      const CMatrix us = u_of(a);
      const CMatrix vs = v_of(a);
      AlphaSample sample{a, matrix_p_norm_estimate(us, 2.0), matrix_p_norm_estimate(vs, 2.0), 0.0};
      if (dual_path) {
        const CVector spectral = us * probe;
        const CVector quadrature = qb->power(a, qa->power(-a, probe));
        sample.dual_path_error = (spectral - quadrature).norm() / std::max(spectral.norm(), tiny);
      }
      plan.sweep_sup_u = std::max(plan.sweep_sup_u, sample.u_norm2);
      plan.sweep_sup_v = std::max(plan.sweep_sup_v, sample.v_norm2);
      plan.sweep.push_back(sample);
    }
  }
  return plan;
}

TransferIdentities transfer_identities(const TransferPlan& plan, const CVector& u) {
  const CVector la_f = apply_function(plan.a, MultiplierSpec::power(plan.alpha), u);
  const CVector lb_f = apply_function(plan.b, MultiplierSpec::power(plan.alpha), u);
  const CVector lb_vf = apply_function(plan.b, MultiplierSpec::power(plan.alpha), CVector(plan.v_matrix * u));
  TransferIdentities out;
  out.u_residual = (plan.u_matrix * la_f - lb_f).norm() / std::max(lb_f.norm(), tiny);
  out.v_residual = (lb_vf - la_f).norm() / std::max(la_f.norm(), tiny);
  return out;
}

namespace {

/// ∫_0^t ψ_outer(sL_B) M ψ_inner((t-s)L_A) f s^{-outer}(t-s)^{-inner} ds with
/// outer + inner = 1. The powers cancel against the density, so the integrand
/// is bounded and the endpoint panels carry the singular weights.
CVector factorized_term(const TransferPlan& plan, const CVector& u, double t, int n_quad, double outer,
                        double inner, const CMatrix& middle) {
  const QuadratureRule rule = graded_beta_rule(t, -outer, -inner, n_quad);
  const CMatrix x = function_orbit(plan.a, u, remaining_times(rule, t),
                                   [inner](double r) { return MultiplierSpec::psi(inner, r); });
  auto psi_outer = [outer](cplx lambda, double s) { return std::pow(s * lambda, outer) * std::exp(-s * lambda); };
  return weighted_outer_sum(plan.b, middle * x, rule, psi_outer, std::nullopt);
}

}  // namespace

DuhamelTerms duhamel_factorized(const TransferPlan& plan, const CVector& u, double t, int n_quad, double tol) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "time must be positive", t);
  if (u.size() != plan.a.size()) throw Error(ErrorKind::dimension, "vector size does not match operators");
  DuhamelTerms out{CVector::Zero(u.size()), CVector::Zero(u.size())};
  if (u.norm() == 0.0) return out;
  const double alpha = plan.alpha;
  const double beta = 1.0 - alpha;
  out.first = factorized_term(plan, u, t, n_quad, beta, alpha, plan.u_matrix);
  out.second = factorized_term(plan, u, t, n_quad, alpha, beta, plan.v_matrix);

  const CVector exact = exp_apply(plan.a, u, t) - exp_apply(plan.b, u, t);
  const double scale = std::max(exact.norm(), 1e-12 * u.norm());
  const double err = (out.first - out.second - exact).norm() / scale;
  if (!(err <= tol)) throw Error(ErrorKind::accuracy, "factorized Duhamel terms did not converge", err);
  return out;
}

DuhamelTerms duhamel_direct_terms(const SpectralFactorization& fa, const SpectralFactorization& fb,
                                  const CVector& u, double t, int n_quad) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "time must be positive", t);
  check_pair(fa, fb);
  const QuadratureRule rule = graded_beta_rule(t, 0.0, 0.0, n_quad);
  const CMatrix x = semigroup_orbit(fa, u, remaining_times(rule, t));
  auto lambda_exp = [](cplx lambda, double s) { return lambda * std::exp(-s * lambda); };
  auto plain_exp = [](cplx lambda, double s) { return std::exp(-s * lambda); };
  DuhamelTerms out;
  out.first = weighted_outer_sum(fb, x, rule, lambda_exp, cplx(0.0));
  out.second = weighted_outer_sum(fb, fa.op().matrix() * x, rule, plain_exp, cplx(1.0));
  return out;
}

std::vector<double> two_parameter_grid(const SpectralFactorization& f1, const SpectralFactorization& f2,
                                       int per_decade) {
  const double hi_mod = std::max(f1.max_modulus(), f2.max_modulus());
  const double lo_mod = std::min(f1.min_modulus(), f2.min_modulus());
  return log_grid(1e-4 / hi_mod, 1e4 / lo_mod, per_decade);
}

MaximalScan two_parameter_scan(const SpectralFactorization& f1, const SpectralFactorization& f2,
                               const GridFunction& g, double p, const std::vector<double>& w_grid,
                               const std::vector<double>& t_grid, bool refine) {
  check_grid(w_grid);
  check_grid(t_grid);
  check_pair(f1, f2);
  const DiscreteOperator& op = f1.op();
  const CVector u = op.restrict(g);
  const CMatrix inner = semigroup_orbit(f2, u, t_grid);  // T^{A₂}_t f, one column per t
  const CMatrix h = f1.inverse_eigenvectors() * inner;
  CMatrix kernel_part;
  if (f1.kernel_dim() > 0) kernel_part = f1.kernel_projector() * inner;
  const CVector& ev = f1.eigenvalues();

  const bool real_a1 = op.field().is_real();
  CMatrix dominating;
  if (real_a1) {
    // T^{A₁}_w applied to M^{A₂} f for every w.
    const RVector m2 = row_sup_abs(inner);
    dominating = semigroup_orbit(f1, m2.cast<cplx>(), w_grid);
  }

  RVector sup = RVector::Zero(u.size());
  double violation = -std::numeric_limits<double>::infinity();
  CMatrix scaled(h.rows(), h.cols());
  for (std::size_t i = 0; i < w_grid.size(); ++i) {
    for (Eigen::Index k = 0; k < h.rows(); ++k) scaled.row(k) = std::exp(-w_grid[i] * ev(k)) * h.row(k);
    CMatrix z = f1.right_eigenvectors() * scaled;
    if (f1.kernel_dim() > 0) z += kernel_part;
    const RVector zmax = z.cwiseAbs().rowwise().maxCoeff();
    sup = sup.cwiseMax(zmax);
    if (real_a1) violation = std::max(violation, (zmax - dominating.col(i).real()).maxCoeff());
  }

  MaximalScan scan;
  scan.which = MaximalScan::Which::two_parameter;
  scan.t_grid = t_grid;
  scan.w_grid = w_grid;
  scan.p = p;
  scan.per_node_sup = as_grid_function(op, sup);
  scan.ratio = ratio_of(op, sup, u, p);
  if (real_a1) {
    const double fmax = u.cwiseAbs().maxCoeff();
    scan.domination_violation = fmax > 0.0 ? violation / fmax : violation;
  }
  if (refine) {
    finish_refinement(scan,
                      two_parameter_scan(f1, f2, g, p, refine_log_grid(w_grid), refine_log_grid(t_grid), false).ratio);
  }
  return scan;
}

NormEstimate operator_norm_estimate(const std::function<double(const CVector&)>& ratio_of_vector,
                                    const std::vector<CVector>& family, const CMatrix& directions, int steps,
                                    std::uint64_t seed, double step_size) {
  if (family.size() < 20) {
    throw Error(ErrorKind::domain, "norm estimation needs at least 20 scans", static_cast<double>(family.size()));
  }
  NormEstimate out;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double r = ratio_of_vector(family[i]);
    if (r > out.initial_max) {
      out.initial_max = r;
      worst = i;
    }
  }
  out.estimate = out.initial_max;
  out.worst = family[worst];
  if (directions.cols() == 0) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int step = 0; step < steps; ++step) {
    CVector z(directions.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = cplx(normal(rng), normal(rng));
    const CVector d = directions * z;
    const double dn = d.norm();
    if (dn > 0.0) {
      const CVector candidate = out.worst + (step_size * out.worst.norm() / dn) * d;
      const double r = ratio_of_vector(candidate);
      if (r > out.estimate) {
        out.estimate = r;
        out.worst = candidate;
        ++out.accepted_steps;
      }
    }
    out.history.push_back(out.estimate);
  }
  return out;
}

}  // namespace pellip
