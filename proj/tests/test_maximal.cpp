#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pellip/error.hpp"
#include "pellip/maximal.hpp"

using namespace pellip;

namespace {

const Grid line = Grid::interval(1.0, 32);

CMatrix scalar(cplx a) {
  CMatrix m(1, 1);
  m << a;
  return m;
}

DiscreteOperator op_of(const MatrixField& f, const BoundaryCondition& bc = BoundaryCondition::dirichlet()) {
  return assemble(f, bc);
}

MatrixField real_checker() { return MatrixField::checkerboard(line, scalar(1.0), scalar(3.0)); }
MatrixField complex_checker() { return MatrixField::checkerboard(line, scalar({1, 0.5}), scalar({2, -0.4})); }

GridFunction positive_bump(const Grid& g) {
  GridFunction f = GridFunction::zeros(g);
  for (int i = 0; i < g.node_count(); ++i) {
    const double x = g.node_coordinates(i)[0];
    f.values(i) = std::sin(pi * x) * (1.0 + 0.5 * std::cos(7 * x));
  }
  return f;
}

double rel(const CVector& a, const CVector& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_SUITE("maximal") {

TEST_CASE("real Z-matrix semigroup: sup dominates f and stays below ‖f‖_∞") {
  const auto f = factorize(op_of(real_checker()));
  const GridFunction g = positive_bump(line);
  const auto t = maximal_time_grid(f, 20);
  const auto scan = maximal_scan(f, g, INFINITY, t);
  for (int i = 0; i < line.node_count(); ++i) {
    CHECK(scan.per_node_sup.values(i).real() >= std::abs(g.values(i)) * (1 - 1e-3) - 1e-14);
  }
  CHECK(scan.ratio <= 1.0 + 1e-12);
  CHECK(scan.ratio >= 1.0 - 1e-3);
  CHECK(scan.grid_sensitivity < 1e-3);
}

TEST_CASE("eigenfunction orbits peak at t → 0") {
  const auto f = factorize(op_of(real_checker()));
  const auto& op = f.op();
  const CVector v = f.right_eigenvectors().col(3);
  const GridFunction g = op.extend(v);
  const auto t = maximal_time_grid(f, 30);
  const double lambda = std::abs(f.eigenvalues()(3));
  for (double p : {2.0, 4.0}) {
    const auto s = maximal_scan(f, g, p, t);
    CHECK(s.ratio == doctest::Approx(std::exp(-t.front() * lambda)).epsilon(1e-10));
    const auto e = ergodic_scan(f, g, p, t);
    CHECK(e.ratio == doctest::Approx(std::abs(MultiplierSpec::ergodic(t.front())(lambda))).epsilon(1e-10));
  }
}

TEST_CASE("orbit columns are the semigroup") {
  const auto f = factorize(op_of(complex_checker()));
  const CVector u = f.op().restrict(positive_bump(line));
  const std::vector<double> t{1e-4, 1e-2, 1.0};
  const CMatrix orbit = semigroup_orbit(f, u, t);
  for (int k = 0; k < 3; ++k) {
    CHECK(rel(orbit.col(k), apply_function(f, MultiplierSpec::semigroup(t[k]), u)) < 1e-13);
  }
  CHECK_THROWS_AS(maximal_scan(f, positive_bump(line), 2.0, {1.0, 0.5}), Error);
}

TEST_CASE("ergodic comparison identity") {
  const auto f = factorize(op_of(complex_checker()));
  const CVector u = f.op().restrict(positive_bump(line));
  for (double t : {1e-3, 0.1, 10.0}) CHECK(ergodic_comparison_residual(f, u, t, 2048) < 1e-10);
}

TEST_CASE("difference scans satisfy the triangle split") {
  const auto fa = factorize(op_of(complex_checker()));
  const auto fb = factorize(op_of(MatrixField::random_elliptic(line, 11)));
  const auto t = maximal_time_grid(fa, 20);
  const auto d = difference_scan(fa, fb, positive_bump(line), 2.0, t, false);
  REQUIRE(d.split_violation.has_value());
  CHECK(*d.split_violation <= 1e-12);
  // A = B gives a zero difference.
  const auto z = difference_scan(fa, fa, positive_bump(line), 2.0, t, false);
  CHECK(z.ratio == 0.0);
}

TEST_CASE("Duhamel integrals against the exact eigen-coordinate formula") {
  const auto fa = factorize(op_of(complex_checker()));
  const auto fb = factorize(op_of(MatrixField::random_elliptic(line, 5)));
  const CVector u = fa.op().restrict(positive_bump(line));
  for (double t : {1e-3, 0.1}) {
    const auto [first, second] = oracle::duhamel_terms(fa, fb, u, t);
    const auto d = duhamel_direct_terms(fa, fb, u, t, 512);
    CHECK(rel(d.first, first) < 1e-8);
    CHECK(rel(d.second, second) < 1e-8);
    // I - II = T^A - T^B.
    const CVector gap = apply_function(fa, MultiplierSpec::semigroup(t), u) - apply_function(fb, MultiplierSpec::semigroup(t), u);
    CHECK(rel(first - second, gap) < 1e-10);
    CHECK(duhamel_residual(fa, fb, u, t, 512) < 1e-8);
  }
  CHECK(duhamel_residual(fa, fa, u, 0.1, 64) < 1e-12);
}

TEST_CASE("beta measures") {
  for (double alpha : {0.1, 0.25, 0.45}) {
    const BetaMeasure m{alpha, 2.0};
    CHECK(m.exact_mass() == doctest::Approx(pi / std::sin(alpha * pi)));
    CHECK(std::abs(m.mass() - m.exact_mass()) < 1e-10);
    const BetaMeasure shifted{alpha, 2.0, 0.5};
    CHECK(shifted.mass() < m.exact_mass());
    CHECK(shifted.density(1.0) == doctest::Approx(std::pow(1.5, alpha - 1) * std::pow(1.0, -alpha)));
  }
  CHECK_THROWS_AS((BetaMeasure{1.0, 1.0}.validate()), Error);
  CHECK_THROWS_AS((BetaMeasure{0.3, -1.0}.validate()), Error);
}

TEST_CASE("transfer operators of equal and scaled pairs") {
  const auto la = op_of(complex_checker());
  const double alpha = 0.3;
  const auto same = build_transfer(la, la, alpha, {2.0, 4.0}, {}, false);
  const auto n = la.size();
  CHECK((same.u_matrix - CMatrix::Identity(n, n)).norm() < 1e-10);
  CHECK((same.v_matrix - CMatrix::Identity(n, n)).norm() < 1e-10);

  const double c = 2.5;
  const auto lb = op_of(MatrixField::checkerboard(line, scalar({2.5, 1.25}), scalar({5.0, -1.0})));
  const auto scaled = build_transfer(lb, la, alpha, {2.0, 3.0}, {0.1, 0.4}, true);
  CHECK((scaled.u_matrix - std::pow(c, -alpha) * CMatrix::Identity(n, n)).norm() < 1e-9);
  CHECK((scaled.v_matrix - std::pow(c, alpha) * CMatrix::Identity(n, n)).norm() < 1e-9);
  for (const auto& tn : scaled.norms) {
    CHECK(tn.u_norm == doctest::Approx(std::pow(c, -alpha)).epsilon(1e-8));
    // V^{B,A} = (L_{A*}^α L_{B*}^{-α})* = c^{α} here.
    CHECK(tn.v_norm == doctest::Approx(std::pow(c, alpha)).epsilon(1e-8));
  }
  for (const auto& s : scaled.sweep) CHECK(s.dual_path_error < 1e-7);

  const CVector u = la.restrict(positive_bump(line));
  const auto id = transfer_identities(scaled, u);
  CHECK(id.u_residual < 1e-10);
  CHECK(id.v_residual < 1e-10);
}

TEST_CASE("transfer preconditions") {
  const auto la = op_of(complex_checker());
  CHECK_THROWS_AS(build_transfer(la, la, 0.5, {2.0}), Error);
  CHECK_THROWS_AS(build_transfer(la, la, 0.0, {2.0}), Error);
  const auto other = op_of(MatrixField::constant(Grid::interval(1.0, 16), scalar(1.0)));
  CHECK_THROWS_AS(build_transfer(la, other, 0.25, {2.0}), Error);
  const auto neumann = op_of(complex_checker(), BoundaryCondition::neumann());
  CHECK_THROWS_AS(build_transfer(neumann, neumann, 0.25, {2.0}), Error);
}

TEST_CASE("factorized Duhamel terms match the direct ones") {
  const auto la = op_of(complex_checker());
  const auto lb = op_of(MatrixField::random_elliptic(line, 9));
  const auto plan = build_transfer(la, lb, 0.25, {2.0}, {}, false);
  const CVector u = la.restrict(positive_bump(line));
  const double t = 0.05;
  const auto fac = duhamel_factorized(plan, u, t, 512);
  const auto [first, second] = oracle::duhamel_terms(plan.a, plan.b, u, t);
  CHECK(rel(fac.first, first) < 1e-7);
  CHECK(rel(fac.second, second) < 1e-7);
}

TEST_CASE("two-parameter scan of a single operator reduces to sums of times") {
  const auto f = factorize(op_of(complex_checker()));
  const GridFunction g = positive_bump(line);
  const std::vector<double> w{1e-4, 1e-3, 1e-2, 1e-1};
  const std::vector<double> t{1e-4, 1e-2, 1.0};
  const auto two = two_parameter_scan(f, f, g, 2.0, w, t, false);
  std::vector<double> sums;
  for (double a : w)
    for (double b : t) sums.push_back(a + b);
  const CVector u = f.op().restrict(g);
  const CMatrix orbit = semigroup_orbit(f, u, sums);
  const RVector sup = orbit.cwiseAbs().rowwise().maxCoeff();
  const CVector two_sup = f.op().restrict(two.per_node_sup);
  CHECK((two_sup.real() - sup).norm() < 1e-12 * sup.norm());
  CHECK_FALSE(two.domination_violation.has_value());
}

TEST_CASE("two-parameter domination with a real first field") {
  const auto f1 = factorize(op_of(real_checker()));
  const auto f2 = factorize(op_of(complex_checker()));
  const auto grid = two_parameter_grid(f1, f2, 5);
  const auto s = two_parameter_scan(f1, f2, positive_bump(line), 2.0, grid, grid, false);
  REQUIRE(s.domination_violation.has_value());
  CHECK(*s.domination_violation <= 1e-12);
}

TEST_CASE("greedy norm estimates only improve") {
  std::vector<CVector> family;
  for (int k = 0; k < 20; ++k) family.push_back(CVector::Random(6));
  const auto ratio = [](const CVector& v) { return std::abs(v(0) + v(1)) / v.norm(); };
  const auto est = operator_norm_estimate(ratio, family, CMatrix::Identity(6, 6), 300);
  CHECK(est.estimate >= est.initial_max);
  for (std::size_t k = 1; k < est.history.size(); ++k) CHECK(est.history[k] >= est.history[k - 1]);
  CHECK(est.estimate <= std::sqrt(2.0) + 1e-12);
  CHECK(est.estimate > 1.3);
  CHECK_THROWS_AS(operator_norm_estimate(ratio, {family.begin(), family.begin() + 5}, CMatrix::Identity(6, 6)), Error);
}

TEST_CASE("matrix p-norm estimates") {
  CMatrix m(3, 3);
  m << 1, cplx(0, -2), 0.5, 0, 3, cplx(1, 1), -1, 0, 2;
  const double one = m.cwiseAbs().colwise().sum().maxCoeff();
  const double inf = m.cwiseAbs().rowwise().sum().maxCoeff();
  CHECK(matrix_p_norm_estimate(m, 1.0) == doctest::Approx(one));
  CHECK(matrix_p_norm_estimate(m, INFINITY) == doctest::Approx(inf));
  Eigen::JacobiSVD<CMatrix> svd(m);
  CHECK(matrix_p_norm_estimate(m, 2.0) == doctest::Approx(svd.singularValues()(0)));
  for (double p : {1.5, 3.0, 6.0}) {
    const double est = matrix_p_norm_estimate(m, p);
    // Riesz–Thorin upper bound.
    CHECK(est <= std::pow(one, 1 / p) * std::pow(inf, 1 - 1 / p) * (1 + 1e-12));
    const CVector e = CVector::Unit(3, 1);
    CHECK(est >= weighted_lp_norm(m * e, RVector::Ones(3), p) - 1e-12);
  }
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 0.5, cplx(0, -4), 2;
  CHECK(matrix_p_norm_estimate(d, 3.0) == doctest::Approx(4.0));
}

}
