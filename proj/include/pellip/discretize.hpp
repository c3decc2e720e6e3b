#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pellip/grid.hpp"
#include "pellip/linalg.hpp"

namespace pellip {

/// Per-cell coefficient matrices A(x) on a grid (1×1 in 1D, 2×2 in 2D).
class MatrixField {
 public:
  MatrixField(Grid grid, std::vector<CMatrix> per_cell, std::string tag = "custom");

  static MatrixField constant(const Grid& grid, const CMatrix& a);
  /// e^{iθ} B with B real.
  static MatrixField rotated_real(const Grid& grid, double theta, const RMatrix& b);
  /// A1 and A2 alternating on a `tiles`-per-axis checkerboard in physical
  /// coordinates, so the field does not change with resolution.
  static MatrixField checkerboard(const Grid& grid, const CMatrix& a1, const CMatrix& a2,
                                  int tiles = 4);
  /// Seeded piecewise-constant elliptic field on `tiles` per axis: Hermitian
  /// part with eigenvalues in [0.5, 2], anti-Hermitian part of size up to
  /// `skew`. Tiles are physical, so the field does not change with resolution.
  static MatrixField random_elliptic(const Grid& grid, std::uint64_t seed, int tiles = 4, double skew = 1.0);

  const Grid& grid() const { return grid_; }
  const std::vector<CMatrix>& per_cell() const { return per_cell_; }
  const CMatrix& at(int cell) const { return per_cell_[cell]; }
  const std::string& tag() const { return tag_; }

  MatrixField adjoint() const;
  bool is_real(double tol = 0.0) const;

  /// min over cells of λ(A(x)), max over cells of Λ(A(x)).
  double lambda() const;
  double capital_lambda() const;
  /// Essential infimum over cells of Δ_p.
  double delta_p(double p) const;
  /// Intersection of the per-cell p-ellipticity ranges.
  double mu_star(double tol = 1e-8) const;

 private:
  Grid grid_;
  std::vector<CMatrix> per_cell_;
  std::string tag_;
};

/// Dense matrix of −div(A∇) on the non-Dirichlet nodes. With n the node
/// weight (h or h_x h_y) and the lumped inner product ⟨u, v⟩ = n v*u,
/// ⟨Lu, u⟩ equals Σ_samples w ⟨A G u, G u⟩ exactly.
class DiscreteOperator {
 public:
  const CMatrix& matrix() const { return matrix_; }
  const Grid& grid() const { return field_->grid(); }
  const BoundaryCondition& bc() const { return bc_; }
  const MatrixField& field() const { return *field_; }
  int kernel_dim() const { return kernel_dim_; }
  Eigen::Index size() const { return matrix_.rows(); }

  /// Node index of each unknown.
  const std::vector<int>& active_nodes() const { return active_; }
  /// Trapezoid weights restricted to unknowns.
  const RVector& weights() const { return weights_; }

  CVector restrict(const GridFunction& f) const;
  GridFunction extend(const CVector& u) const;

  /// Sparse discrete gradient: one row block per gradient sample.
  /// Returns Σ w |G u|² (the Â = I energy) and the form value Σ w ⟨A G u, G u⟩.
  cplx form(const CVector& u) const;
  double gradient_energy(const CVector& u) const;

  /// True when both operators act on the same unknowns.
  bool compatible(const DiscreteOperator& other) const;

 private:
  friend DiscreteOperator assemble(const MatrixField&, const BoundaryCondition&);

  CMatrix matrix_;
  std::shared_ptr<const MatrixField> field_;
  BoundaryCondition bc_ = BoundaryCondition::dirichlet();
  int kernel_dim_ = 0;
  std::vector<int> active_;
  std::vector<int> node_to_active_;
  RVector weights_;
};

DiscreteOperator assemble(const MatrixField& field, const BoundaryCondition& bc);

struct KernelProjection {
  int kernel_dim = 0;
  CMatrix projector;
};

/// Orthogonal projector onto N(L): averaging onto constants for pure
/// Neumann, zero otherwise.
KernelProjection kernel_projection(const DiscreteOperator& op);

void write_csv(std::ostream& out, const CMatrix& m);

}  // namespace pellip
