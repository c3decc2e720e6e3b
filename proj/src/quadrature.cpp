#include "pellip/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "pellip/error.hpp"

namespace pellip {

QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadratureRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::domain, "quadrature needs at least one node");
  if (!(a > -1.0) || !(b > -1.0)) throw Error(ErrorKind::domain, "Jacobi exponents must exceed -1");
  // Monic recurrence coefficients of the Jacobi polynomials.
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 0) {
      diag(k) = (b - a) / (a + b + 2.0);
    } else {
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
    if (k + 1 < n) {
      const double k1 = k + 1.0;
      const double s1 = 2.0 * k1 + a + b;
      if (k == 0) {
        // (k1 + a + b) cancels against (s1 - 1); keeps a + b = -1 finite.
        off(k) = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / (s1 * s1 * (s1 + 1.0)));
      } else {
        const double num = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b);
        const double den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
        off(k) = std::sqrt(num / den);
      }
    }
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  jacobi.diagonal() = diag;
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off(k);
    jacobi(k + 1, k) = off(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(a + b + 2.0));
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

namespace {

/// Panel breakpoints on [0, t]: widths finest*t, finest*t, 2 finest*t, ... from
/// each end, meeting in the middle.
std::vector<double> graded_breaks(double t, double finest) {
  std::vector<double> left{0.0};
  double width = std::max(finest, 1e-300) * t;
  double x = 0.0;
  while (x + width < 0.5 * t) {
    x += width;
    left.push_back(x);
    if (left.size() > 2) width *= 2.0;
  }
  // Merge the last partial panel when it is too thin relative to its neighbour.
  if (left.size() > 2 && 0.5 * t - left.back() < 0.25 * (left.back() - left[left.size() - 2])) {
    left.pop_back();
  }
  std::vector<double> breaks = left;
  breaks.push_back(0.5 * t);
  for (auto it = left.rbegin(); it != left.rend(); ++it) breaks.push_back(t - *it);
  return breaks;
}

using Density = std::function<double(double)>;
// Density in terms of s and t - s, the latter passed exactly where it is known.
using Density2 = std::function<double(double, double)>;

QuadratureRule assemble_graded(double t, double a_left, double b_right, int total_nodes, double finest,
                               const Density& smooth_left, const Density& smooth_right, const Density2& full) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "integration interval must have positive length");
  const std::vector<double> breaks = graded_breaks(t, finest);
  const int panels = static_cast<int>(breaks.size()) - 1;
  const int per_panel = std::max(4, total_nodes / panels);
  const QuadratureRule legendre = gauss_legendre(per_panel);
  const QuadratureRule jac_left = gauss_jacobi(per_panel, 0.0, a_left);
  const QuadratureRule jac_right = gauss_jacobi(per_panel, b_right, 0.0);
  QuadratureRule out;
  out.nodes.reserve(static_cast<std::size_t>(per_panel) * panels);
  out.weights.reserve(static_cast<std::size_t>(per_panel) * panels);
  for (int p = 0; p < panels; ++p) {
    const double lo = breaks[p];
    const double hi = breaks[p + 1];
    const double half = 0.5 * (hi - lo);
    if (p == 0 && a_left != 0.0) {
      // (s - lo)^a = half^a (1 + x)^a
      const double scale = std::pow(half, a_left + 1.0);
      for (int k = 0; k < per_panel; ++k) {
        const double s = lo + half * (1.0 + jac_left.nodes[k]);
        out.nodes.push_back(s);
        out.weights.push_back(scale * jac_left.weights[k] * smooth_left(s));
      }
    } else if (p == panels - 1 && b_right != 0.0) {
      const double scale = std::pow(half, b_right + 1.0);
      for (int k = 0; k < per_panel; ++k) {
        const double s = lo + half * (1.0 + jac_right.nodes[k]);
        out.nodes.push_back(s);
        out.weights.push_back(scale * jac_right.weights[k] * smooth_right(s));
      }
    } else if (p == 0 || p == panels - 1) {
      for (int k = 0; k < per_panel; ++k) {
        const double s = lo + half * (1.0 + legendre.nodes[k]);
        out.nodes.push_back(s);
        out.weights.push_back(half * legendre.weights[k] * full(s, t - s));
      }
    } else {
      // Gauss–Legendre in the log of the distance to the nearer end, where
      // power laws and boundary layers are smooth: r = e^x, dr = r dx.
      const bool left_half = hi <= 0.5 * t;
      const double r_lo = left_half ? lo : t - hi;
      const double r_hi = left_half ? hi : t - lo;
      const double x_lo = std::log(r_lo);
      const double x_half = 0.5 * (std::log(r_hi) - x_lo);
      for (int k = 0; k < per_panel; ++k) {
        const double r = std::exp(x_lo + x_half * (1.0 + legendre.nodes[k]));
        const double s = left_half ? r : t - r;
        out.nodes.push_back(s);
        out.weights.push_back(x_half * legendre.weights[k] * r * (left_half ? full(s, t - s) : full(s, r)));
      }
    }
  }
  return out;
}

}  // namespace

QuadratureRule graded_beta_rule(double t, double a, double b, int total_nodes, double finest) {
  auto smooth_left = [=](double s) { return std::pow(t - s, b); };
  auto smooth_right = [=](double s) { return std::pow(s, a); };
  auto full = [=](double s, double rest) { return std::pow(s, a) * std::pow(rest, b); };
  return assemble_graded(t, a, b, total_nodes, finest, smooth_left, smooth_right, full);
}

QuadratureRule graded_shifted_beta_rule(double t, double w, double a, double b, int total_nodes,
                                        double finest) {
  if (!(w >= 0.0)) throw Error(ErrorKind::domain, "shift w must be non-negative", w);
  if (w == 0.0) return graded_beta_rule(t, a, b, total_nodes, finest);
  auto smooth_left = [=](double s) { return std::pow(w + s, a) * std::pow(t - s, b); };
  auto smooth_right = [=](double s) { return std::pow(w + s, a); };
  auto full = [=](double s, double rest) { return std::pow(w + s, a) * std::pow(rest, b); };
  // No singular factor at the left end once w > 0.
  return assemble_graded(t, 0.0, b, total_nodes, finest, smooth_left, smooth_right, full);
}

std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw Error(ErrorKind::domain, "invalid logspace request");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < count; ++k) out[k] = std::exp(a + (b - a) * k / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (per_decade < 1) throw Error(ErrorKind::domain, "log grid needs at least one point per decade");
  const double decades = std::log10(hi / lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  return logspace(lo, hi, count);
}

std::vector<double> refine_log_grid(const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(2 * grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) out.push_back(std::sqrt(grid[k - 1] * grid[k]));
    out.push_back(grid[k]);
  }
  return out;
}

}  // namespace pellip
