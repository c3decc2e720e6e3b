#pragma once

#include <vector>

namespace pellip {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  template <class F>
  auto integrate(F&& f) const {
    auto sum = weights[0] * f(nodes[0]);
    for (std::size_t k = 1; k < nodes.size(); ++k) sum += weights[k] * f(nodes[k]);
    return sum;
  }
};

/// n-point Gauss–Legendre on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// n-point Gauss–Jacobi on [-1, 1] for the weight (1-x)^a (1+x)^b, a, b > -1
/// (Golub–Welsch on the Jacobi three-term recurrence).
QuadratureRule gauss_jacobi(int n, double a, double b);

/// Rule for ∫_0^t g(s) s^a (t-s)^b ds. Panels are graded geometrically
/// (ratio 2) from width `finest * t` at both endpoints toward the middle; the
/// two endpoint panels use Gauss–Jacobi for the singular factor, the others
/// Gauss–Legendre with the density folded into the weights. `total_nodes` is
/// split evenly over the panels (at least 3 per panel). a = b = 0 gives a plain
/// graded Gauss–Legendre rule.
QuadratureRule graded_beta_rule(double t, double a, double b, int total_nodes, double finest = 1e-10);

/// Same, for ∫_0^t g(s) (w+s)^a (t-s)^b ds with w ≥ 0.
QuadratureRule graded_shifted_beta_rule(double t, double w, double a, double b, int total_nodes,
                                        double finest = 1e-10);

/// Logarithmically spaced samples, `per_decade` per factor of ten, both ends included.
std::vector<double> log_grid(double lo, double hi, int per_decade);

/// `count` logarithmically spaced samples between lo and hi inclusive.
std::vector<double> logspace(double lo, double hi, int count);

/// Inserts the geometric midpoint between consecutive samples.
std::vector<double> refine_log_grid(const std::vector<double>& grid);

}  // namespace pellip
