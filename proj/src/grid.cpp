#include "pellip/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "pellip/error.hpp"

namespace pellip {

Grid::Grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells)
    : dim_(dim), extents_(extents), cells_(cells) {
  for (int axis = 0; axis < dim_; ++axis) {
    if (cells_[axis] < 2) throw Error(ErrorKind::domain, "grid needs at least 3 nodes per axis");
    if (!(extents_[axis] > 0.0)) throw Error(ErrorKind::domain, "grid extent must be positive");
  }
  weights_.resize(node_count());
  for (int n = 0; n < node_count(); ++n) {
    const auto ij = node_ij(n);
    double w = 1.0;
    for (int axis = 0; axis < dim_; ++axis) {
      const bool boundary = ij[axis] == 0 || ij[axis] == cells_[axis];
      w *= spacing(axis) * (boundary ? 0.5 : 1.0);
    }
    weights_(n) = w;
  }
}

Grid Grid::interval(double length, int cells) { return Grid(1, {length, 1.0}, {cells, 0}); }

Grid Grid::rectangle(double length_x, double length_y, int cells_x, int cells_y) {
  return Grid(2, {length_x, length_y}, {cells_x, cells_y});
}

int Grid::node_count() const {
  return dim_ == 1 ? nodes_per_axis(0) : nodes_per_axis(0) * nodes_per_axis(1);
}

int Grid::cell_count() const { return dim_ == 1 ? cells_[0] : cells_[0] * cells_[1]; }

std::array<int, 2> Grid::node_ij(int index) const {
  if (dim_ == 1) return {index, 0};
  return {index % nodes_per_axis(0), index / nodes_per_axis(0)};
}

std::array<double, 2> Grid::node_coordinates(int index) const {
  const auto ij = node_ij(index);
  return {ij[0] * spacing(0), dim_ == 2 ? ij[1] * spacing(1) : 0.0};
}

std::array<double, 2> Grid::cell_center(int cell) const {
  if (dim_ == 1) return {(cell + 0.5) * spacing(0), 0.0};
  const int i = cell % cells_[0];
  const int j = cell / cells_[0];
  return {(i + 0.5) * spacing(0), (j + 0.5) * spacing(1)};
}

double Grid::cell_volume() const { return dim_ == 1 ? spacing(0) : spacing(0) * spacing(1); }

bool Grid::operator==(const Grid& other) const {
  if (dim_ != other.dim_) return false;
  for (int axis = 0; axis < dim_; ++axis) {
    if (cells_[axis] != other.cells_[axis] || extents_[axis] != other.extents_[axis]) return false;
  }
  return true;
}

const char* to_string(Face face) {
  switch (face) {
    case Face::left: return "left";
    case Face::right: return "right";
    case Face::bottom: return "bottom";
    case Face::top: return "top";
  }
  return "?";
}

Face face_from_string(const std::string& name) {
  if (name == "left") return Face::left;
  if (name == "right") return Face::right;
  if (name == "bottom") return Face::bottom;
  if (name == "top") return Face::top;
  throw Error(ErrorKind::config, "unknown boundary face '" + name + "'");
}

const char* to_string(BoundaryCondition::Kind kind) {
  switch (kind) {
    case BoundaryCondition::Kind::dirichlet: return "dirichlet";
    case BoundaryCondition::Kind::neumann: return "neumann";
    case BoundaryCondition::Kind::mixed: return "mixed";
  }
  return "?";
}

BoundaryCondition BoundaryCondition::mixed(std::vector<Face> faces) {
  if (faces.empty()) throw Error(ErrorKind::domain, "mixed boundary condition needs a non-empty Dirichlet part");
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  return BoundaryCondition(Kind::mixed, std::move(faces));
}

std::vector<Face> BoundaryCondition::dirichlet_faces(int dim) const {
  switch (kind_) {
    case Kind::neumann: return {};
    case Kind::dirichlet:
      if (dim == 1) return {Face::left, Face::right};
      return {Face::left, Face::right, Face::bottom, Face::top};
    case Kind::mixed: {
      std::vector<Face> out;
      for (Face f : faces_) {
        if (dim == 1 && (f == Face::bottom || f == Face::top)) {
          throw Error(ErrorKind::domain, "faces bottom/top do not exist on a 1D grid");
        }
        out.push_back(f);
      }
      return out;
    }
  }
  return {};
}

bool BoundaryCondition::is_dirichlet_node(const Grid& grid, int node) const {
  const auto ij = grid.node_ij(node);
  for (Face f : dirichlet_faces(grid.dim())) {
    switch (f) {
      case Face::left:
        if (ij[0] == 0) return true;
        break;
      case Face::right:
        if (ij[0] == grid.cells(0)) return true;
        break;
      case Face::bottom:
        if (ij[1] == 0) return true;
        break;
      case Face::top:
        if (ij[1] == grid.cells(1)) return true;
        break;
    }
  }
  return false;
}

bool BoundaryCondition::operator==(const BoundaryCondition& other) const {
  return kind_ == other.kind_ && faces_ == other.faces_;
}

GridFunction::GridFunction(Grid g, CVector v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.node_count()) {
    throw Error(ErrorKind::dimension, "grid function value count does not match grid nodes");
  }
}

GridFunction GridFunction::zeros(const Grid& g) { return GridFunction(g, CVector::Zero(g.node_count())); }

GridFunction GridFunction::constant(const Grid& g, cplx value) {
  return GridFunction(g, CVector::Constant(g.node_count(), value));
}

double weighted_lp_norm(const CVector& values, const RVector& weights, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::domain, "lp norm needs p >= 1", p);
  if (std::isinf(p)) return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
  const double peak = values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  // Scale by the peak so large p does not underflow.
  double sum = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    sum += std::pow(std::abs(values(j)) / peak, p) * weights(j);
  }
  return peak * std::pow(sum, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) {
  return weighted_lp_norm(f.values, f.grid.quadrature_weights(), p);
}

Smoothness smoothness_from_string(const std::string& name) {
  if (name == "rough") return Smoothness::rough;
  if (name == "smooth") return Smoothness::smooth;
  if (name == "bandlimited") return Smoothness::bandlimited;
  throw Error(ErrorKind::config, "unknown smoothness '" + name + "'");
}

CMatrix sine_basis(const Grid& grid, int modes) {
  const int columns = grid.dim() == 1 ? modes : modes * modes;
  CMatrix basis(grid.node_count(), columns);
  for (int n = 0; n < grid.node_count(); ++n) {
    const auto x = grid.node_coordinates(n);
    for (int c = 0; c < columns; ++c) {
      const int kx = c % modes + 1;
      double v = std::sin(kx * pi * x[0] / grid.extent(0));
      if (grid.dim() == 2) {
        const int ky = c / modes + 1;
        v *= std::sin(ky * pi * x[1] / grid.extent(1));
      }
      basis(n, c) = v;
    }
  }
  return basis;
}

namespace {

CVector gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(j) = cplx(re, im);
  }
  return v;
}

CVector neighbour_average(const Grid& grid, const CVector& v) {
  CVector out(v.size());
  for (int n = 0; n < grid.node_count(); ++n) {
    const auto ij = grid.node_ij(n);
    cplx sum = v(n);
    int count = 1;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      for (int step : {-1, 1}) {
        auto nb = ij;
        nb[axis] += step;
        if (nb[axis] < 0 || nb[axis] > grid.cells(axis)) continue;
        sum += v(grid.node_index(nb[0], nb[1]));
        ++count;
      }
    }
    out(n) = sum / static_cast<double>(count);
  }
  return out;
}

}  // namespace

GridFunction random_test_function(const Grid& grid, std::uint64_t seed, Smoothness smoothness,
                                  int modes) {
  std::mt19937_64 rng(seed);
  switch (smoothness) {
    case Smoothness::rough:
      return GridFunction(grid, gaussian_vector(rng, grid.node_count()));
    case Smoothness::smooth: {
      CVector v = gaussian_vector(rng, grid.node_count());
      constexpr int passes = 4;
      for (int k = 0; k < passes; ++k) v = neighbour_average(grid, v);
      return GridFunction(grid, v);
    }
    case Smoothness::bandlimited: {
      const CMatrix basis = sine_basis(grid, modes);
      return GridFunction(grid, basis * gaussian_vector(rng, basis.cols()));
    }
  }
  return GridFunction::zeros(grid);
}

double discrete_gradient_norm2(const GridFunction& f) {
  const Grid& g = f.grid;
  double sum = 0.0;
  for (int n = 0; n < g.node_count(); ++n) {
    const auto ij = g.node_ij(n);
    for (int axis = 0; axis < g.dim(); ++axis) {
      if (ij[axis] == g.cells(axis)) continue;
      auto nb = ij;
      nb[axis] += 1;
      const double h = g.spacing(axis);
      sum += std::norm(f.values(g.node_index(nb[0], nb[1])) - f.values(n)) / (h * h);
    }
  }
  return sum * g.cell_volume();
}

void write_csv(std::ostream& out, const GridFunction& f) {
  out.precision(17);
  out << (f.grid.dim() == 1 ? "x,re,im\n" : "x,y,re,im\n");
  for (int n = 0; n < f.grid.node_count(); ++n) {
    const auto x = f.grid.node_coordinates(n);
    out << x[0] << ',';
    if (f.grid.dim() == 2) out << x[1] << ',';
    out << f.values(n).real() << ',' << f.values(n).imag() << '\n';
  }
}

}  // namespace pellip
