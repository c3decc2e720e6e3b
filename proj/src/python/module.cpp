#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pellip/calculus.hpp"
#include "pellip/ellipticity.hpp"
#include "pellip/error.hpp"
#include "pellip/experiment.hpp"
#include "pellip/gamma.hpp"
#include "pellip/maximal.hpp"
#include "pellip/subordinate.hpp"

namespace py = pybind11;
using namespace pellip;

namespace {

GridFunction as_grid_function(const DiscreteOperator& op, const CVector& values) {
  // Accept either node values or unknowns.
  if (values.size() == op.grid().node_count()) return GridFunction(op.grid(), values);
  return op.extend(values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-ellipticity, functional calculus and maximal operators for complex divergence-form operators";

  static py::exception<Error> error(m, "PellipError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object instance = exc(e.what());
      instance.attr("kind") = to_string(e.kind());
      instance.attr("value") = e.value() ? py::cast(*e.value()) : py::none();
      PyErr_SetObject(exc.ptr(), instance.ptr());
    }
  });

  // ellipticity
  m.def("mu_of", &mu_of, py::arg("p"));
  m.def("conjugate_exponent", &conjugate_exponent, py::arg("p"));
  m.def("lambda_of", &lambda_of, py::arg("a"));
  m.def("capital_lambda_of", &capital_lambda_of, py::arg("a"));
  m.def("delta_p", &delta_p, py::arg("a"), py::arg("p"));
  m.def("delta_mu", &delta_mu, py::arg("a"), py::arg("mu"));
  py::class_<PRange>(m, "PRange")
      .def_readonly("p_min", &PRange::p_min)
      .def_readonly("p_max", &PRange::p_max)
      .def_readonly("mu_star", &PRange::mu_star)
      .def("contains", &PRange::contains)
      .def("__repr__", [](const PRange& r) {
        return "PRange(p_min=" + std::to_string(r.p_min) + ", p_max=" + std::to_string(r.p_max) + ")";
      });
  m.def("p_ellipticity_range", &p_ellipticity_range, py::arg("a"), py::arg("tol") = 1e-12);

  // grids and fields
  py::class_<Grid>(m, "Grid")
      .def_static("interval", &Grid::interval, py::arg("length"), py::arg("cells"))
      .def_static("rectangle", &Grid::rectangle, py::arg("length_x"), py::arg("length_y"), py::arg("cells_x"),
                  py::arg("cells_y"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("node_count", &Grid::node_count)
      .def_property_readonly("cell_count", &Grid::cell_count)
      .def_property_readonly("weights", &Grid::quadrature_weights)
      .def("cells", &Grid::cells)
      .def("spacing", &Grid::spacing);

  py::class_<BoundaryCondition>(m, "BoundaryCondition")
      .def_static("dirichlet", &BoundaryCondition::dirichlet)
      .def_static("neumann", &BoundaryCondition::neumann)
      .def_static("mixed", [](const std::vector<std::string>& faces) {
        std::vector<Face> out;
        for (const auto& f : faces) out.push_back(face_from_string(f));
        return BoundaryCondition::mixed(out);
      });

  py::class_<MatrixField>(m, "MatrixField")
      .def_static("constant", &MatrixField::constant, py::arg("grid"), py::arg("a"))
      .def_static("rotated_real", &MatrixField::rotated_real, py::arg("grid"), py::arg("theta"), py::arg("b"))
      .def_static("checkerboard", &MatrixField::checkerboard, py::arg("grid"), py::arg("a1"), py::arg("a2"),
                  py::arg("tiles") = 4)
      .def_static("random_elliptic", &MatrixField::random_elliptic, py::arg("grid"), py::arg("seed"),
                  py::arg("tiles") = 4, py::arg("skew") = 1.0)
      .def_static("library", [](const std::string& name, const Grid& g) { return library_field(name, g).field; })
      .def("adjoint", &MatrixField::adjoint)
      .def("lambda_", &MatrixField::lambda)
      .def("capital_lambda", &MatrixField::capital_lambda)
      .def("delta_p", &MatrixField::delta_p)
      .def("mu_star", &MatrixField::mu_star, py::arg("tol") = 1e-8)
      .def_property_readonly("tag", &MatrixField::tag);

  py::class_<DiscreteOperator>(m, "DiscreteOperator")
      .def_property_readonly("matrix", &DiscreteOperator::matrix)
      .def_property_readonly("weights", &DiscreteOperator::weights)
      .def_property_readonly("kernel_dim", &DiscreteOperator::kernel_dim)
      .def_property_readonly("size", &DiscreteOperator::size)
      .def_property_readonly("grid", &DiscreteOperator::grid)
      .def("restrict", [](const DiscreteOperator& op, const CVector& v) { return op.restrict(GridFunction(op.grid(), v)); })
      .def("extend", [](const DiscreteOperator& op, const CVector& u) { return op.extend(u).values; });
  m.def("assemble", &assemble, py::arg("field"), py::arg("bc") = BoundaryCondition::dirichlet());

  // functional calculus
  py::class_<MultiplierSpec>(m, "MultiplierSpec")
      .def_static("semigroup", &MultiplierSpec::semigroup, py::arg("t"))
      .def_static("psi", &MultiplierSpec::psi, py::arg("beta"), py::arg("t") = 1.0)
      .def_static("rotation_difference", &MultiplierSpec::rotation_difference, py::arg("theta"), py::arg("sign"),
                  py::arg("t") = 1.0)
      .def_static("imaginary", &MultiplierSpec::imaginary, py::arg("u"))
      .def_static("power", &MultiplierSpec::power, py::arg("alpha"), py::arg("t") = 1.0)
      .def_static("ergodic", &MultiplierSpec::ergodic, py::arg("t"))
      .def("__call__", &MultiplierSpec::operator());

  py::class_<SpectralFactorization>(m, "SpectralFactorization")
      .def_property_readonly("eigenvalues", &SpectralFactorization::eigenvalues)
      .def_property_readonly("condition_number", &SpectralFactorization::condition_number)
      .def_property_readonly("reconstruction_residual", &SpectralFactorization::reconstruction_residual)
      .def_property_readonly("kernel_dim", &SpectralFactorization::kernel_dim)
      .def("min_modulus", &SpectralFactorization::min_modulus)
      .def("max_modulus", &SpectralFactorization::max_modulus)
      .def("function_matrix", py::overload_cast<const MultiplierSpec&>(&SpectralFactorization::function_matrix, py::const_));
  m.def("factorize", &factorize, py::arg("op"), py::arg("max_condition") = 1e10);
  m.def("apply_function", py::overload_cast<const SpectralFactorization&, const MultiplierSpec&, const CVector&>(&apply_function),
        py::arg("f"), py::arg("symbol"), py::arg("u"));
  m.def("fractional_power_quadrature",
        py::overload_cast<const DiscreteOperator&, double, const CVector&, double>(&fractional_power_quadrature),
        py::arg("op"), py::arg("alpha"), py::arg("u"), py::arg("tol") = 1e-11);
  m.def("square_function_probe", &square_function_probe, py::arg("f"), py::arg("gamma"), py::arg("x"));

  // subordination
  m.def("complex_gamma", &complex_gamma, py::arg("z"));
  m.def("log_gamma", &log_gamma, py::arg("z"));
  m.def("mellin_psi", &mellin_psi, py::arg("alpha"), py::arg("u"));
  m.def("mellin_m_theta", &mellin_m_theta, py::arg("theta"), py::arg("sign"), py::arg("u"));
  m.def("cowling_reconstruct",
        py::overload_cast<const SpectralFactorization&, const MultiplierSpec&, double, const CVector&, double, int, double>(
            &cowling_reconstruct),
        py::arg("f"), py::arg("symbol"), py::arg("t"), py::arg("u"), py::arg("truncation_u") = 60.0,
        py::arg("n_quad") = 4000, py::arg("tol") = 1e-8);

  // maximal operators
  m.def("beta_mass", [](double alpha, double t, double w, int n_quad) { return BetaMeasure{alpha, t, w}.mass(n_quad); },
        py::arg("alpha"), py::arg("t"), py::arg("w") = 0.0, py::arg("n_quad") = 512);
  m.def("maximal_time_grid", &maximal_time_grid, py::arg("f"), py::arg("per_decade") = 60);
  m.def(
      "maximal_ratio",
      [](const SpectralFactorization& f, const CVector& values, double p, const std::vector<double>& t_grid) {
        const auto scan = maximal_scan(f, as_grid_function(f.op(), values), p, t_grid, false);
        return py::make_tuple(scan.ratio, scan.per_node_sup.values.real().eval());
      },
      py::arg("f"), py::arg("values"), py::arg("p"), py::arg("t_grid"));
  m.def(
      "duhamel_residual",
      [](const SpectralFactorization& fa, const SpectralFactorization& fb, const CVector& u, double t, int n_quad) {
        return duhamel_residual(fa, fb, u, t, n_quad);
      },
      py::arg("fa"), py::arg("fb"), py::arg("u"), py::arg("t"), py::arg("n_quad") = 512);

  // experiments: config text in, summary JSON text out
  m.def(
      "run_experiment",
      [](const std::string& config_text, bool write) {
        const ExperimentRecord rec = run(parse_config(config_text), write);
        return rec.summary().dump();
      },
      py::arg("config"), py::arg("write") = false);
  m.attr("experiment_kinds") = experiment_kinds();
}
