#include "pellip/discretize.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>

#include <functional>
#include <ostream>

#include "pellip/ellipticity.hpp"
#include "pellip/error.hpp"

namespace pellip {

MatrixField::MatrixField(Grid grid, std::vector<CMatrix> per_cell, std::string tag)
    : grid_(std::move(grid)), per_cell_(std::move(per_cell)), tag_(std::move(tag)) {
  if (static_cast<int>(per_cell_.size()) != grid_.cell_count()) {
    throw Error(ErrorKind::dimension, "matrix field needs one matrix per grid cell");
  }
  for (const auto& a : per_cell_) {
    if (a.rows() != grid_.dim() || a.cols() != grid_.dim()) {
      throw Error(ErrorKind::dimension, "per-cell matrix size must equal the grid dimension");
    }
    if (!a.allFinite()) throw Error(ErrorKind::domain, "matrix field has non-finite entries");
  }
}

MatrixField MatrixField::constant(const Grid& grid, const CMatrix& a) {
  return MatrixField(grid, std::vector<CMatrix>(grid.cell_count(), a), "constant");
}

MatrixField MatrixField::rotated_real(const Grid& grid, double theta, const RMatrix& b) {
  const CMatrix a = std::polar(1.0, theta) * b.cast<cplx>();
  return MatrixField(grid, std::vector<CMatrix>(grid.cell_count(), a), "rotated_real");
}

MatrixField MatrixField::checkerboard(const Grid& grid, const CMatrix& a1, const CMatrix& a2, int tiles) {
  if (tiles < 1) throw Error(ErrorKind::domain, "checkerboard needs at least one tile per axis");
  std::vector<CMatrix> cells;
  cells.reserve(grid.cell_count());
  for (int c = 0; c < grid.cell_count(); ++c) {
    const auto x = grid.cell_center(c);
    int parity = static_cast<int>(std::floor(x[0] / grid.extent(0) * tiles));
    if (grid.dim() == 2) parity += static_cast<int>(std::floor(x[1] / grid.extent(1) * tiles));
    cells.push_back(parity % 2 == 0 ? a1 : a2);
  }
  return MatrixField(grid, std::move(cells), "checkerboard");
}

MatrixField MatrixField::random_elliptic(const Grid& grid, std::uint64_t seed, int tiles, double skew) {
  if (tiles < 1) throw Error(ErrorKind::domain, "random field needs at least one tile per axis");
  if (!(skew >= 0.0)) throw Error(ErrorKind::domain, "skew must be nonnegative", skew);
  const int d = grid.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const int tile_count = d == 1 ? tiles : tiles * tiles;
  std::vector<CMatrix> tile_matrices;
  for (int k = 0; k < tile_count; ++k) {
    RMatrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
    const RMatrix q = Eigen::HouseholderQR<RMatrix>(g).householderQ();
    RVector eig(d);
    for (int i = 0; i < d; ++i) eig(i) = 0.5 + 1.5 * unit(rng);
    const CMatrix h = (q * eig.asDiagonal() * q.transpose()).cast<cplx>();
    CMatrix k_raw(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) k_raw(i, j) = cplx(normal(rng), normal(rng));
    CMatrix skew_part = 0.5 * (k_raw - k_raw.adjoint());
    const double n = skew_part.norm();
    if (n > 0.0) skew_part *= skew * unit(rng) / n;
    tile_matrices.push_back(h + skew_part);
  }
  std::vector<CMatrix> cells;
  cells.reserve(grid.cell_count());
  for (int c = 0; c < grid.cell_count(); ++c) {
    const auto x = grid.cell_center(c);
    const int ix = std::min(tiles - 1, static_cast<int>(std::floor(x[0] / grid.extent(0) * tiles)));
    int index = ix;
    if (d == 2) index += tiles * std::min(tiles - 1, static_cast<int>(std::floor(x[1] / grid.extent(1) * tiles)));
    cells.push_back(tile_matrices[index]);
  }
  return MatrixField(grid, std::move(cells), "random_elliptic");
}

MatrixField MatrixField::adjoint() const {
  std::vector<CMatrix> cells;
  cells.reserve(per_cell_.size());
  for (const auto& a : per_cell_) cells.push_back(a.adjoint());
  return MatrixField(grid_, std::move(cells), tag_ + "*");
}

bool MatrixField::is_real(double tol) const {
  for (const auto& a : per_cell_) {
    if (a.imag().cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

double MatrixField::lambda() const {
  double out = INFINITY;
  for (const auto& a : per_cell_) out = std::min(out, lambda_of(a));
  return out;
}

double MatrixField::capital_lambda() const {
  double out = 0.0;
  for (const auto& a : per_cell_) out = std::max(out, capital_lambda_of(a));
  return out;
}

double MatrixField::delta_p(double p) const {
  double out = INFINITY;
  for (const auto& a : per_cell_) out = std::min(out, pellip::delta_p(a, p));
  return out;
}

double MatrixField::mu_star(double tol) const {
  double out = 1.0;
  for (const auto& a : per_cell_) out = std::min(out, p_ellipticity_range(a, tol).mu_star);
  return out;
}

namespace {

/// One constant-gradient sample: G u restricted to `nodes` is `d * u_loc`.
struct GradientSample {
  int cell;
  double weight;
  std::array<int, 3> nodes;
  int node_count;
  Eigen::Matrix<double, 2, 3> d;  // rows: gradient components
};

/// 1D: one sample per cell. 2D: each cell split along its (i,j)-(i+1,j+1)
/// diagonal into two P1 triangles with exact constant gradients.
void for_each_sample(const Grid& g, const std::function<void(const GradientSample&)>& fn) {
  if (g.dim() == 1) {
    const double h = g.spacing(0);
    for (int c = 0; c < g.cells(0); ++c) {
      GradientSample s{c, h, {c, c + 1, 0}, 2, Eigen::Matrix<double, 2, 3>::Zero()};
      s.d(0, 0) = -1.0 / h;
      s.d(0, 1) = 1.0 / h;
      fn(s);
    }
    return;
  }
  const double hx = g.spacing(0);
  const double hy = g.spacing(1);
  const double area = 0.5 * hx * hy;
  for (int j = 0; j < g.cells(1); ++j) {
    for (int i = 0; i < g.cells(0); ++i) {
      const int cell = i + j * g.cells(0);
      const int n00 = g.node_index(i, j);
      const int n10 = g.node_index(i + 1, j);
      const int n01 = g.node_index(i, j + 1);
      const int n11 = g.node_index(i + 1, j + 1);
      // Lower triangle (n00, n10, n11).
      GradientSample lower{cell, area, {n00, n10, n11}, 3, Eigen::Matrix<double, 2, 3>::Zero()};
      lower.d(0, 0) = -1.0 / hx;
      lower.d(0, 1) = 1.0 / hx;
      lower.d(1, 1) = -1.0 / hy;
      lower.d(1, 2) = 1.0 / hy;
      fn(lower);
      // Upper triangle (n00, n01, n11).
      GradientSample upper{cell, area, {n00, n01, n11}, 3, Eigen::Matrix<double, 2, 3>::Zero()};
      upper.d(0, 1) = -1.0 / hx;
      upper.d(0, 2) = 1.0 / hx;
      upper.d(1, 0) = -1.0 / hy;
      upper.d(1, 1) = 1.0 / hy;
      fn(upper);
    }
  }
}

}  // namespace

DiscreteOperator assemble(const MatrixField& field, const BoundaryCondition& bc) {
  const Grid& g = field.grid();
  DiscreteOperator op;
  op.field_ = std::make_shared<const MatrixField>(field);
  op.bc_ = bc;
  op.node_to_active_.assign(g.node_count(), -1);
  for (int n = 0; n < g.node_count(); ++n) {
    if (bc.is_dirichlet_node(g, n)) continue;
    op.node_to_active_[n] = static_cast<int>(op.active_.size());
    op.active_.push_back(n);
  }
  const auto size = static_cast<Eigen::Index>(op.active_.size());
  if (size == 0) throw Error(ErrorKind::domain, "boundary condition leaves no unknowns");
  op.weights_.resize(size);
  for (Eigen::Index k = 0; k < size; ++k) op.weights_(k) = g.quadrature_weights()(op.active_[k]);
  op.kernel_dim_ = bc.dirichlet_faces(g.dim()).empty() ? 1 : 0;

  const int d = g.dim();
  const double node_weight = g.cell_volume();
  op.matrix_ = CMatrix::Zero(size, size);
  for_each_sample(g, [&](const GradientSample& s) {
    const CMatrix& a = field.at(s.cell);
    const double scale = s.weight / node_weight;
    // Local form matrix w Dᵀ A D; entry (r, c) multiplies conj(u_r) u_c.
    // Summed by hand in an order that maps onto itself under (r, c, A) ->
    // (c, r, A*), so assembling A* gives the conjugate transpose bit for bit.
    for (int r = 0; r < s.node_count; ++r) {
      const int ar = op.node_to_active_[s.nodes[r]];
      if (ar < 0) continue;
      for (int c = 0; c < s.node_count; ++c) {
        const int ac = op.node_to_active_[s.nodes[c]];
        if (ac < 0) continue;
        cplx sum = 0.0;
        for (int i = 0; i < d; ++i) sum += (s.d(i, r) * s.d(i, c)) * a(i, i);
        for (int i = 0; i < d; ++i) {
          for (int j = i + 1; j < d; ++j) {
            sum += (s.d(i, r) * s.d(j, c)) * a(i, j) + (s.d(j, r) * s.d(i, c)) * a(j, i);
          }
        }
        op.matrix_(ar, ac) += scale * sum;
      }
    }
  });
  return op;
}

CVector DiscreteOperator::restrict(const GridFunction& f) const {
  if (f.grid != grid()) throw Error(ErrorKind::grid_mismatch, "grid function lives on a different grid");
  CVector u(size());
  for (Eigen::Index k = 0; k < size(); ++k) u(k) = f.values(active_[k]);
  return u;
}

GridFunction DiscreteOperator::extend(const CVector& u) const {
  if (u.size() != size()) throw Error(ErrorKind::dimension, "vector size does not match operator");
  GridFunction f = GridFunction::zeros(grid());
  for (Eigen::Index k = 0; k < size(); ++k) f.values(active_[k]) = u(k);
  return f;
}

cplx DiscreteOperator::form(const CVector& u) const {
  const Grid& g = grid();
  const int d = g.dim();
  cplx sum = 0.0;
  for_each_sample(g, [&](const GradientSample& s) {
    CVector loc = CVector::Zero(s.node_count);
    for (int r = 0; r < s.node_count; ++r) {
      const int a = node_to_active_[s.nodes[r]];
      if (a >= 0) loc(r) = u(a);
    }
    const CVector grad = s.d.topLeftCorner(d, s.node_count).cast<cplx>() * loc;
    sum += s.weight * grad.dot(field_->at(s.cell) * grad);
  });
  return sum;
}

double DiscreteOperator::gradient_energy(const CVector& u) const {
  const Grid& g = grid();
  const int d = g.dim();
  double sum = 0.0;
  for_each_sample(g, [&](const GradientSample& s) {
    CVector loc = CVector::Zero(s.node_count);
    for (int r = 0; r < s.node_count; ++r) {
      const int a = node_to_active_[s.nodes[r]];
      if (a >= 0) loc(r) = u(a);
    }
    sum += s.weight * (s.d.topLeftCorner(d, s.node_count).cast<cplx>() * loc).squaredNorm();
  });
  return sum;
}

bool DiscreteOperator::compatible(const DiscreteOperator& other) const {
  return grid() == other.grid() && active_ == other.active_;
}

KernelProjection kernel_projection(const DiscreteOperator& op) {
  KernelProjection kp;
  kp.kernel_dim = op.kernel_dim();
  const auto n = op.size();
  if (kp.kernel_dim == 0) {
    kp.projector = CMatrix::Zero(n, n);
  } else {
    kp.projector = CMatrix::Constant(n, n, cplx(1.0 / static_cast<double>(n), 0.0));
  }
  return kp;
}

void write_csv(std::ostream& out, const CMatrix& m) {
  out.precision(17);
  out << "row,col,re,im\n";
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out << r << ',' << c << ',' << m(r, c).real() << ',' << m(r, c).imag() << '\n';
    }
  }
}

}  // namespace pellip
