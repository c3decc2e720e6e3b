#include <doctest.h>

#include <sstream>

#include "pellip/error.hpp"
#include "pellip/grid.hpp"

using namespace pellip;

TEST_SUITE("grid") {

TEST_CASE("node and cell counts") {
  const Grid g = Grid::interval(2.0, 10);
  CHECK(g.node_count() == 11);
  CHECK(g.cell_count() == 10);
  CHECK(g.spacing(0) == doctest::Approx(0.2));
  const Grid r = Grid::rectangle(1.0, 2.0, 4, 8);
  CHECK(r.node_count() == 45);
  CHECK(r.cell_count() == 32);
  CHECK(r.node_ij(r.node_index(3, 5)) == std::array<int, 2>{3, 5});
}

TEST_CASE("trapezoid weights integrate constants and linear functions exactly") {
  const Grid r = Grid::rectangle(1.5, 2.0, 6, 5);
  CHECK(r.quadrature_weights().sum() == doctest::Approx(3.0));
  double lin = 0.0;
  for (int n = 0; n < r.node_count(); ++n) lin += r.quadrature_weights()(n) * r.node_coordinates(n)[0];
  CHECK(lin == doctest::Approx(1.5 * 1.5 / 2 * 2.0));
}

TEST_CASE("lp norms") {
  const Grid g = Grid::interval(2.0, 16);
  const GridFunction c = GridFunction::constant(g, cplx(0.0, 3.0));
  CHECK(lp_norm(c, 1.0) == doctest::Approx(6.0));
  CHECK(lp_norm(c, 2.0) == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(lp_norm(c, 4.0) == doctest::Approx(3.0 * std::pow(2.0, 0.25)));
  CHECK(lp_norm(c, INFINITY) == doctest::Approx(3.0));
  CHECK(lp_norm(GridFunction::zeros(g), 3.0) == 0.0);
}

TEST_CASE("random test functions are reproducible") {
  const Grid g = Grid::interval(1.0, 32);
  for (auto s : {Smoothness::rough, Smoothness::smooth, Smoothness::bandlimited}) {
    const auto a = random_test_function(g, 5, s);
    const auto b = random_test_function(g, 5, s);
    const auto c = random_test_function(g, 6, s);
    CHECK((a.values - b.values).norm() == 0.0);
    CHECK((a.values - c.values).norm() > 0.0);
  }
}

TEST_CASE("bandlimited functions agree across resolutions") {
  const auto coarse = random_test_function(Grid::interval(1.0, 32), 3, Smoothness::bandlimited);
  const auto fine = random_test_function(Grid::interval(1.0, 64), 3, Smoothness::bandlimited);
  for (int i = 0; i <= 32; ++i) CHECK(std::abs(coarse.values(i) - fine.values(2 * i)) < 1e-12);
}

TEST_CASE("smoothing lowers the discrete gradient energy") {
  const Grid g = Grid::interval(1.0, 64);
  double rough = 0.0, smooth = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = random_test_function(g, seed, Smoothness::rough);
    const auto s = random_test_function(g, seed, Smoothness::smooth);
    rough += discrete_gradient_norm2(r) / std::pow(lp_norm(r, 2.0), 2);
    smooth += discrete_gradient_norm2(s) / std::pow(lp_norm(s, 2.0), 2);
  }
  CHECK(smooth < 0.2 * rough);
}

TEST_CASE("boundary conditions") {
  const Grid r = Grid::rectangle(1.0, 1.0, 4, 4);
  const auto dir = BoundaryCondition::dirichlet();
  const auto mixed = BoundaryCondition::mixed({Face::left});
  CHECK(dir.is_dirichlet_node(r, r.node_index(0, 2)));
  CHECK(dir.is_dirichlet_node(r, r.node_index(2, 4)));
  CHECK_FALSE(dir.is_dirichlet_node(r, r.node_index(2, 2)));
  CHECK(mixed.is_dirichlet_node(r, r.node_index(0, 3)));
  CHECK_FALSE(mixed.is_dirichlet_node(r, r.node_index(4, 3)));
  CHECK_FALSE(BoundaryCondition::neumann().is_dirichlet_node(r, 0));
  CHECK_THROWS_AS(BoundaryCondition::mixed({}), Error);
  CHECK(face_from_string("top") == Face::top);
  CHECK_THROWS_AS(face_from_string("middle"), Error);
}

TEST_CASE("csv output") {
  const Grid g = Grid::interval(1.0, 2);
  std::ostringstream os;
  write_csv(os, GridFunction::constant(g, cplx(1.0, -2.0)));
  const std::string text = os.str();
  CHECK(text.rfind("x,re,im\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

}
