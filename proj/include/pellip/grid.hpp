#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pellip/linalg.hpp"

namespace pellip {

/// Uniform tensor grid on [0, L_x] (1D) or [0, L_x] × [0, L_y] (2D).
/// Nodes include the boundary; `cells[k]` cells along axis k.
class Grid {
 public:
  Grid() = default;
  static Grid interval(double length, int cells);
  static Grid rectangle(double length_x, double length_y, int cells_x, int cells_y);

  int dim() const { return dim_; }
  double extent(int axis) const { return extents_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  int nodes_per_axis(int axis) const { return cells_[axis] + 1; }
  double spacing(int axis) const { return extents_[axis] / cells_[axis]; }
  int node_count() const;
  int cell_count() const;

  int node_index(int i, int j = 0) const { return i + j * nodes_per_axis(0); }
  std::array<int, 2> node_ij(int index) const;
  std::array<double, 2> node_coordinates(int index) const;
  std::array<double, 2> cell_center(int cell) const;

  /// Trapezoid weights: full cell volume inside, halved per boundary axis.
  const RVector& quadrature_weights() const { return weights_; }

  /// Volume of one cell, h_x (1D) or h_x h_y (2D).
  double cell_volume() const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  Grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells);

  int dim_ = 1;
  std::array<double, 2> extents_{1.0, 1.0};
  std::array<int, 2> cells_{2, 1};
  RVector weights_;
};

enum class Face { left, right, bottom, top };

const char* to_string(Face face);
Face face_from_string(const std::string& name);

/// Form domain descriptor. `dirichlet_faces` lists the part D of the boundary
/// where functions vanish; dirichlet ≡ all faces, neumann ≡ none.
class BoundaryCondition {
 public:
  enum class Kind { dirichlet, neumann, mixed };

  static BoundaryCondition dirichlet() { return BoundaryCondition(Kind::dirichlet, {}); }
  static BoundaryCondition neumann() { return BoundaryCondition(Kind::neumann, {}); }
  static BoundaryCondition mixed(std::vector<Face> faces);

  Kind kind() const { return kind_; }
  /// Dirichlet faces resolved against the grid dimension.
  std::vector<Face> dirichlet_faces(int dim) const;
  bool is_dirichlet_node(const Grid& grid, int node) const;

  bool operator==(const BoundaryCondition& other) const;

 private:
  BoundaryCondition(Kind kind, std::vector<Face> faces) : kind_(kind), faces_(std::move(faces)) {}

  Kind kind_;
  std::vector<Face> faces_;
};

const char* to_string(BoundaryCondition::Kind kind);

/// Complex values on every grid node.
struct GridFunction {
  Grid grid;
  CVector values;

  GridFunction() = default;
  GridFunction(Grid g, CVector v);
  static GridFunction zeros(const Grid& g);
  static GridFunction constant(const Grid& g, cplx value);
};

/// (Σ |f_j|^p w_j)^{1/p} with trapezoid weights; p = inf gives max |f_j|.
double lp_norm(const GridFunction& f, double p);

/// Same norm on a raw node vector with explicit weights.
double weighted_lp_norm(const CVector& values, const RVector& weights, double p);

enum class Smoothness { rough, smooth, bandlimited };

Smoothness smoothness_from_string(const std::string& name);

/// Reproducible pseudo-random complex field. `bandlimited` is a random
/// combination of the lowest `modes` sine modes per axis with coefficients
/// that depend only on the seed, so the same seed gives the same continuum
/// function at every resolution.
GridFunction random_test_function(const Grid& grid, std::uint64_t seed, Smoothness smoothness,
                                  int modes = 8);

/// Node values of the sine basis used by bandlimited test functions:
/// column k is Π_axis sin(k_axis π x / L). Columns ordered k_x fastest.
CMatrix sine_basis(const Grid& grid, int modes);

/// Sum of |difference|² across grid edges divided by h², a discrete H¹ seminorm².
double discrete_gradient_norm2(const GridFunction& f);

void write_csv(std::ostream& out, const GridFunction& f);

}  // namespace pellip
