#pragma once

#include <vector>

#include "chmhd/grid.hpp"
#include "chmhd/linalg.hpp"

namespace chmhd {

/// Flat numbering of the discrete unknowns.
///   cells : j*nx + i
///   faces : interior x-faces (i = 1..nx-1) first, then interior y-faces
///           (j = 1..ny-1); wall-normal faces carry no unknown
///   nodes : j*(nx+1) + i, boundary nodes included
///   cell vectors : [x component cells; y component cells]
struct Layout {
  GridSpec grid;

  int cells() const noexcept { return grid.nx * grid.ny; }
  int cell(int i, int j) const noexcept { return j * grid.nx + i; }
  int ufaces() const noexcept { return (grid.nx - 1) * grid.ny; }
  int vfaces() const noexcept { return grid.nx * (grid.ny - 1); }
  int faces() const noexcept { return ufaces() + vfaces(); }
  int uface(int i, int j) const noexcept { return j * (grid.nx - 1) + (i - 1); }
  int vface(int i, int j) const noexcept { return ufaces() + (j - 1) * grid.nx + i; }
  int nodes() const noexcept { return (grid.nx + 1) * (grid.ny + 1); }
  int node(int i, int j) const noexcept { return j * (grid.nx + 1) + i; }
};

std::vector<double> pack_velocity(const VectorField& v);
/// Writes interior faces and zeroes the wall-normal faces; ghosts untouched.
void unpack_velocity(std::span<const double> x, VectorField& v);
std::vector<double> pack_cells(const VectorField& b);
void unpack_cells(std::span<const double> x, VectorField& b);

// Matrix-free stencils. Inputs must have their ghost layer filled.

/// 5-point Laplacian of a cell field.
Field laplacian(const Field& f);
/// Face differences of a cell field on every face, wall faces included.
VectorField grad_to_faces(const Field& f);
/// Cell divergence of a MAC field.
Field div_from_faces(const VectorField& v);
/// Scalar curl d(b2)/dx - d(b1)/dy of a cell vector, at nodes.
Field curl_scalar(const VectorField& b);
/// Adjoint of curl_scalar under the weighted inner products, for magnetic
/// fields obeying the homogeneous tangential rule. Approximates (ds/dy, -ds/dx).
VectorField curl_of_scalar(const Field& s);
/// Skew-symmetric advection of `target` by `vel` on interior faces.
VectorField advect_skew(const VectorField& vel, const VectorField& target);
/// (b2 s, -b1 s) at cells, with s averaged from the four surrounding nodes.
VectorField cross_lorentz(const VectorField& b, const Field& s);
/// Two-point average of a cell vector onto interior faces; wall faces are zero.
VectorField cell_to_faces(const VectorField& c);
/// Two-point average of a cell scalar onto every face, using ghosts at walls.
VectorField face_average(const Field& f);
/// Four-point average of a node field at cell centres.
Field node_to_cell(const Field& s);
/// (v x b)_z at nodes: mean of (u b2 - v b1) over the adjacent cells.
Field lorentz_adjoint(const VectorField& v, const VectorField& b);
/// MAC velocity (dpsi/dy, -dpsi/dx) from a node stream function;
/// discretely divergence-free.
VectorField curl_of_node_potential(const Field& psi);
/// Vector Laplacian of a MAC field on interior faces (ghosts from the
/// velocity rule); wall-normal faces are zero.
VectorField vector_laplacian(const VectorField& v);

/// Sum over faces of squared face differences times dx*dy, i.e. the
/// discrete ||grad f||^2 matching the Laplacian assembled for `rule`.
double grad_norm2(const Field& f, const BoundaryRule& rule);

/// Assembled operators for one grid and one set of boundary rules.
/// Immutable after construction.
class StencilContext {
 public:
  StencilContext(const GridSpec& grid, BoundaryRule phase_rule, VelocityRule velocity_rule);

  const GridSpec& grid() const noexcept { return layout_.grid; }
  const Layout& layout() const noexcept { return layout_; }
  const BoundaryRule& phase_rule() const noexcept { return phase_rule_; }
  const VelocityRule& velocity_rule() const noexcept { return velocity_rule_; }

  /// Cell Laplacian under the phase rule.
  const CsrMatrix& laplacian() const noexcept { return lap_; }
  /// Cell Laplacian with homogeneous Neumann walls.
  const CsrMatrix& pressure_laplacian() const noexcept { return lap_neumann_; }
  /// Cells to interior faces.
  const CsrMatrix& grad() const noexcept { return grad_; }
  /// Interior faces to cells.
  const CsrMatrix& div() const noexcept { return div_; }
  const CsrMatrix& velocity_laplacian() const noexcept { return lap_velocity_; }
  /// Cell vectors to nodes, homogeneous tangential rule folded in.
  const CsrMatrix& curl() const noexcept { return curl_; }
  const CsrMatrix& curl_transpose() const noexcept { return curl_t_; }
  /// Trapezoid node weights relative to dx*dy.
  const std::vector<double>& node_weights() const noexcept { return node_w_; }

  /// div(c grad) under the phase rule; cx on x-faces, cy on y-faces.
  CsrMatrix weighted_laplacian(const Field& cx, const Field& cy) const;
  /// Nodes to interior faces: s -> face average of (b2 s, -b1 s).
  CsrMatrix lorentz(const VectorField& b) const;
  /// Centred conservative advection by `vel`, interior faces to interior faces.
  CsrMatrix advection(const VectorField& vel) const;
  /// (C - C^T)/2 of advection(vel).
  CsrMatrix advection_skew(const VectorField& vel) const;

 private:
  Layout layout_;
  BoundaryRule phase_rule_;
  VelocityRule velocity_rule_;
  CsrMatrix lap_;
  CsrMatrix lap_neumann_;
  CsrMatrix grad_;
  CsrMatrix div_;
  CsrMatrix lap_velocity_;
  CsrMatrix curl_;
  CsrMatrix curl_t_;
  std::vector<double> node_w_;
};

}  // namespace chmhd
