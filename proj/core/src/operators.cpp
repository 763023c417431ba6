#include "chmhd/operators.hpp"

#include <array>

namespace chmhd {

std::vector<double> pack_velocity(const VectorField& v) {
  const Layout lay{v.x.grid()};
  const int nx = lay.grid.nx, ny = lay.grid.ny;
  std::vector<double> x(lay.faces());
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) x[lay.uface(i, j)] = v.x(i, j);
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) x[lay.vface(i, j)] = v.y(i, j);
  return x;
}

void unpack_velocity(std::span<const double> x, VectorField& v) {
  const Layout lay{v.x.grid()};
  const int nx = lay.grid.nx, ny = lay.grid.ny;
  if (x.size() != static_cast<std::size_t>(lay.faces())) throw std::invalid_argument("unpack_velocity: size mismatch");
  for (int j = 0; j < ny; ++j) {
    v.x(0, j) = 0.0;
    v.x(nx, j) = 0.0;
    for (int i = 1; i < nx; ++i) v.x(i, j) = x[lay.uface(i, j)];
  }
  for (int i = 0; i < nx; ++i) {
    v.y(i, 0) = 0.0;
    v.y(i, ny) = 0.0;
    for (int j = 1; j < ny; ++j) v.y(i, j) = x[lay.vface(i, j)];
  }
}

std::vector<double> pack_cells(const VectorField& b) {
  std::vector<double> x = b.x.interior();
  const std::vector<double> y = b.y.interior();
  x.insert(x.end(), y.begin(), y.end());
  return x;
}

void unpack_cells(std::span<const double> x, VectorField& b) {
  const std::size_t n = b.x.interior_size();
  if (x.size() != 2 * n) throw std::invalid_argument("unpack_cells: size mismatch");
  b.x.set_interior(x.subspan(0, n));
  b.y.set_interior(x.subspan(n, n));
}

Field laplacian(const Field& f) {
  Field out(f.grid(), Location::cell);
  const double ax = 1.0 / (f.grid().dx() * f.grid().dx());
  const double ay = 1.0 / (f.grid().dy() * f.grid().dy());
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i)
      out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * ax + (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * ay;
  return out;
}

VectorField grad_to_faces(const Field& f) {
  const GridSpec& g = f.grid();
  VectorField out = VectorField::mac(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) out.x(i, j) = (f(i, j) - f(i - 1, j)) / g.dx();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.y(i, j) = (f(i, j) - f(i, j - 1)) / g.dy();
  return out;
}

Field div_from_faces(const VectorField& v) {
  const GridSpec& g = v.x.grid();
  Field out(g, Location::cell);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (v.x(i + 1, j) - v.x(i, j)) / g.dx() + (v.y(i, j + 1) - v.y(i, j)) / g.dy();
  return out;
}

Field curl_scalar(const VectorField& b) {
  const GridSpec& g = b.x.grid();
  Field out(g, Location::node);
  const double hx = 0.5 / g.dx(), hy = 0.5 / g.dy();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      out(i, j) = ((b.y(i, j) + b.y(i, j - 1)) - (b.y(i - 1, j) + b.y(i - 1, j - 1))) * hx -
                  ((b.x(i, j) + b.x(i - 1, j)) - (b.x(i, j - 1) + b.x(i - 1, j - 1))) * hy;
  return out;
}

namespace {

double node_weight(const GridSpec& g, int i, int j) {
  double w = 1.0;
  if (i == 0 || i == g.nx) w *= 0.5;
  if (j == 0 || j == g.ny) w *= 0.5;
  return w;
}

// Folds a possibly-ghost cell index of magnetic component `comp` back onto
// the interior under the homogeneous tangential rule. Returns the sign.
double reflect(const GridSpec& g, int comp, int& ci, int& cj) {
  double s = 1.0;
  if (ci < 0 || ci >= g.nx) {
    ci = ci < 0 ? 0 : g.nx - 1;
    if (comp == 1) s = -s;
  }
  if (cj < 0 || cj >= g.ny) {
    cj = cj < 0 ? 0 : g.ny - 1;
    if (comp == 0) s = -s;
  }
  return s;
}

// Visits the eight (component, cell, coefficient) contributions to the node
// curl at (i, j). Cell indices may lie in the ghost layer.
template <class Fn>
void for_each_curl_entry(const GridSpec& g, int i, int j, Fn&& fn) {
  const double hx = 0.5 / g.dx(), hy = 0.5 / g.dy();
  fn(1, i, j, hx);
  fn(1, i, j - 1, hx);
  fn(1, i - 1, j, -hx);
  fn(1, i - 1, j - 1, -hx);
  fn(0, i, j, -hy);
  fn(0, i - 1, j, -hy);
  fn(0, i, j - 1, hy);
  fn(0, i - 1, j - 1, hy);
}

CsrMatrix assemble_advection(const Layout& lay, const VectorField& vel) {
  const int nx = lay.grid.nx, ny = lay.grid.ny;
  const double rdx = 1.0 / lay.grid.dx(), rdy = 1.0 / lay.grid.dy();
  const Field& U = vel.x;
  const Field& V = vel.y;
  CsrBuilder bld(lay.faces(), lay.faces());
  // Adds flux * 0.5*(q_a + q_b) to row r, for interior unknowns a, b (-1 = none).
  auto flux = [&](int r, double coef, int a, int b) {
    if (coef == 0.0) return;
    if (a >= 0) bld.add(r, a, 0.5 * coef);
    if (b >= 0) bld.add(r, b, 0.5 * coef);
  };
  auto u_id = [&](int i, int j) { return (i >= 1 && i <= nx - 1 && j >= 0 && j < ny) ? lay.uface(i, j) : -1; };
  auto v_id = [&](int i, int j) { return (j >= 1 && j <= ny - 1 && i >= 0 && i < nx) ? lay.vface(i, j) : -1; };

  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const int r = lay.uface(i, j);
      const double ue = 0.5 * (U(i, j) + U(i + 1, j));
      const double uw = 0.5 * (U(i - 1, j) + U(i, j));
      flux(r, ue * rdx, u_id(i, j), u_id(i + 1, j));
      flux(r, -uw * rdx, u_id(i - 1, j), u_id(i, j));
      if (j + 1 < ny) {
        const double vn = 0.5 * (V(i - 1, j + 1) + V(i, j + 1));
        flux(r, vn * rdy, u_id(i, j), u_id(i, j + 1));
      }
      if (j > 0) {
        const double vs = 0.5 * (V(i - 1, j) + V(i, j));
        flux(r, -vs * rdy, u_id(i, j - 1), u_id(i, j));
      }
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int r = lay.vface(i, j);
      const double vn = 0.5 * (V(i, j) + V(i, j + 1));
      const double vs = 0.5 * (V(i, j - 1) + V(i, j));
      flux(r, vn * rdy, v_id(i, j), v_id(i, j + 1));
      flux(r, -vs * rdy, v_id(i, j - 1), v_id(i, j));
      if (i + 1 < nx) {
        const double ue = 0.5 * (U(i + 1, j - 1) + U(i + 1, j));
        flux(r, ue * rdx, v_id(i, j), v_id(i + 1, j));
      }
      if (i > 0) {
        const double uw = 0.5 * (U(i, j - 1) + U(i, j));
        flux(r, -uw * rdx, v_id(i - 1, j), v_id(i, j));
      }
    }
  return bld.build();
}

CsrMatrix skew_part(const CsrMatrix& c) { return add(c, transpose(c), 0.5, -0.5); }

CsrMatrix assemble_cell_laplacian(const GridSpec& g, const BoundaryRule& rule, const Field* cx, const Field* cy) {
  const int nx = g.nx, ny = g.ny;
  const double rx = 1.0 / (g.dx() * g.dx()), ry = 1.0 / (g.dy() * g.dy());
  const bool px = rule.periodic_x(), py = rule.periodic_y();
  CsrBuilder bld(nx * ny, nx * ny);
  auto id = [&](int i, int j) { return j * nx + i; };
  auto link = [&](int a, int b, double c) {
    bld.add(a, a, -c);
    bld.add(a, b, c);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int r = id(i, j);
      bld.add(r, r, 0.0);
      // east and west faces
      if (i + 1 < nx)
        link(r, id(i + 1, j), (cx ? (*cx)(i + 1, j) : 1.0) * rx);
      else if (px)
        link(r, id(0, j), (cx ? (*cx)(0, j) : 1.0) * rx);
      if (i > 0)
        link(r, id(i - 1, j), (cx ? (*cx)(i, j) : 1.0) * rx);
      else if (px)
        link(r, id(nx - 1, j), (cx ? (*cx)(0, j) : 1.0) * rx);
      if (j + 1 < ny)
        link(r, id(i, j + 1), (cy ? (*cy)(i, j + 1) : 1.0) * ry);
      else if (py)
        link(r, id(i, 0), (cy ? (*cy)(i, 0) : 1.0) * ry);
      if (j > 0)
        link(r, id(i, j - 1), (cy ? (*cy)(i, j) : 1.0) * ry);
      else if (py)
        link(r, id(i, ny - 1), (cy ? (*cy)(i, 0) : 1.0) * ry);
    }
  return bld.build();
}

void require_phase_rule(const BoundaryRule& rule) {
  rule.validate();
  for (const SideRule& s : rule.sides)
    if (s.kind == SideRule::Kind::dirichlet || s.data)
      throw ConfigError("phase and chemical potential need homogeneous Neumann or periodic sides");
}

}  // namespace

VectorField curl_of_scalar(const Field& s) {
  const GridSpec& g = s.grid();
  VectorField out = VectorField::cell(g);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double ws = node_weight(g, i, j) * s(i, j);
      for_each_curl_entry(g, i, j, [&](int comp, int ci, int cj, double c) {
        const double sign = reflect(g, comp, ci, cj);
        (comp == 0 ? out.x : out.y)(ci, cj) += sign * c * ws;
      });
    }
  return out;
}

VectorField advect_skew(const VectorField& vel, const VectorField& target) {
  const Layout lay{vel.x.grid()};
  const CsrMatrix n = skew_part(assemble_advection(lay, vel));
  VectorField out = VectorField::mac(lay.grid);
  unpack_velocity(spmv(n, pack_velocity(target)), out);
  return out;
}

Field node_to_cell(const Field& s) {
  Field out(s.grid(), Location::cell);
  for (int j = 0; j < out.nj(); ++j)
    for (int i = 0; i < out.ni(); ++i) out(i, j) = 0.25 * (s(i, j) + s(i + 1, j) + s(i, j + 1) + s(i + 1, j + 1));
  return out;
}

VectorField cross_lorentz(const VectorField& b, const Field& s) {
  const Field sc = node_to_cell(s);
  VectorField out = VectorField::cell(b.x.grid());
  for (int j = 0; j < sc.nj(); ++j)
    for (int i = 0; i < sc.ni(); ++i) {
      out.x(i, j) = b.y(i, j) * sc(i, j);
      out.y(i, j) = -b.x(i, j) * sc(i, j);
    }
  return out;
}

VectorField cell_to_faces(const VectorField& c) {
  const GridSpec& g = c.x.grid();
  VectorField out = VectorField::mac(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) out.x(i, j) = 0.5 * (c.x(i - 1, j) + c.x(i, j));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.y(i, j) = 0.5 * (c.y(i, j - 1) + c.y(i, j));
  return out;
}

VectorField face_average(const Field& f) {
  const GridSpec& g = f.grid();
  VectorField out = VectorField::mac(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) out.x(i, j) = 0.5 * (f(i - 1, j) + f(i, j));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.y(i, j) = 0.5 * (f(i, j - 1) + f(i, j));
  return out;
}

Field lorentz_adjoint(const VectorField& v, const VectorField& b) {
  const GridSpec& g = b.x.grid();
  Field cross(g, Location::cell);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double u = 0.5 * ((i > 0 ? v.x(i, j) : 0.0) + (i + 1 < g.nx ? v.x(i + 1, j) : 0.0));
      const double w = 0.5 * ((j > 0 ? v.y(i, j) : 0.0) + (j + 1 < g.ny ? v.y(i, j + 1) : 0.0));
      cross(i, j) = u * b.y(i, j) - w * b.x(i, j);
    }
  Field out(g, Location::node);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      double sum = 0.0;
      int count = 0;
      for (int cj = j - 1; cj <= j; ++cj)
        for (int ci = i - 1; ci <= i; ++ci)
          if (ci >= 0 && ci < g.nx && cj >= 0 && cj < g.ny) {
            sum += cross(ci, cj);
            ++count;
          }
      out(i, j) = sum / count;
    }
  return out;
}

VectorField curl_of_node_potential(const Field& psi) {
  const GridSpec& g = psi.grid();
  VectorField out = VectorField::mac(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) out.x(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.y(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx();
  return out;
}

VectorField vector_laplacian(const VectorField& v) {
  const GridSpec& g = v.x.grid();
  const double rx = 1.0 / (g.dx() * g.dx()), ry = 1.0 / (g.dy() * g.dy());
  VectorField out = VectorField::mac(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const Field& u = v.x;
      out.x(i, j) = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) * rx + (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) * ry;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Field& w = v.y;
      out.y(i, j) = (w(i + 1, j) - 2.0 * w(i, j) + w(i - 1, j)) * rx + (w(i, j + 1) - 2.0 * w(i, j) + w(i, j - 1)) * ry;
    }
  return out;
}

double grad_norm2(const Field& f, const BoundaryRule& rule) {
  require_phase_rule(rule);
  const GridSpec& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  double sx = 0.0, sy = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) sx += (f(i, j) - f(i - 1, j)) * (f(i, j) - f(i - 1, j));
    if (rule.periodic_x()) sx += (f(0, j) - f(nx - 1, j)) * (f(0, j) - f(nx - 1, j));
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) sy += (f(i, j) - f(i, j - 1)) * (f(i, j) - f(i, j - 1));
    if (rule.periodic_y()) sy += (f(i, 0) - f(i, ny - 1)) * (f(i, 0) - f(i, ny - 1));
  }
  return (sx / (g.dx() * g.dx()) + sy / (g.dy() * g.dy())) * g.cell_area();
}

StencilContext::StencilContext(const GridSpec& grid, BoundaryRule phase_rule, VelocityRule velocity_rule)
    : layout_{grid}, phase_rule_(std::move(phase_rule)), velocity_rule_(velocity_rule) {
  require_phase_rule(phase_rule_);
  const int nx = grid.nx, ny = grid.ny;
  const double rdx = 1.0 / grid.dx(), rdy = 1.0 / grid.dy();
  lap_ = assemble_cell_laplacian(grid, phase_rule_, nullptr, nullptr);
  lap_neumann_ = assemble_cell_laplacian(grid, BoundaryRule::neumann(), nullptr, nullptr);

  CsrBuilder gb(layout_.faces(), layout_.cells());
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      gb.add(layout_.uface(i, j), layout_.cell(i, j), rdx);
      gb.add(layout_.uface(i, j), layout_.cell(i - 1, j), -rdx);
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      gb.add(layout_.vface(i, j), layout_.cell(i, j), rdy);
      gb.add(layout_.vface(i, j), layout_.cell(i, j - 1), -rdy);
    }
  grad_ = gb.build();
  div_ = transpose(grad_);
  for (double& v : div_.val) v = -v;

  const double rx2 = rdx * rdx, ry2 = rdy * rdy;
  auto alpha = [&](Side s) { return velocity_rule_[s] == Wall::no_slip ? -1.0 : 1.0; };
  CsrBuilder lb(layout_.faces(), layout_.faces());
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const int r = layout_.uface(i, j);
      double diag = -2.0 * rx2 - 2.0 * ry2;
      if (i > 1) lb.add(r, layout_.uface(i - 1, j), rx2);
      if (i < nx - 1) lb.add(r, layout_.uface(i + 1, j), rx2);
      if (j > 0)
        lb.add(r, layout_.uface(i, j - 1), ry2);
      else
        diag += alpha(Side::bottom) * ry2;
      if (j < ny - 1)
        lb.add(r, layout_.uface(i, j + 1), ry2);
      else
        diag += alpha(Side::top) * ry2;
      lb.add(r, r, diag);
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int r = layout_.vface(i, j);
      double diag = -2.0 * rx2 - 2.0 * ry2;
      if (j > 1) lb.add(r, layout_.vface(i, j - 1), ry2);
      if (j < ny - 1) lb.add(r, layout_.vface(i, j + 1), ry2);
      if (i > 0)
        lb.add(r, layout_.vface(i - 1, j), rx2);
      else
        diag += alpha(Side::left) * rx2;
      if (i < nx - 1)
        lb.add(r, layout_.vface(i + 1, j), rx2);
      else
        diag += alpha(Side::right) * rx2;
      lb.add(r, r, diag);
    }
  lap_velocity_ = lb.build();

  const int nc = layout_.cells();
  CsrBuilder cb(layout_.nodes(), 2 * nc);
  node_w_.resize(layout_.nodes());
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int r = layout_.node(i, j);
      node_w_[r] = node_weight(grid, i, j);
      for_each_curl_entry(grid, i, j, [&](int comp, int ci, int cj, double c) {
        const double sign = reflect(grid, comp, ci, cj);
        cb.add(r, comp * nc + layout_.cell(ci, cj), sign * c);
      });
    }
  curl_ = cb.build(true);
  curl_t_ = transpose(curl_);
}

CsrMatrix StencilContext::weighted_laplacian(const Field& cx, const Field& cy) const {
  if (cx.location() != Location::xface || cy.location() != Location::yface)
    throw std::invalid_argument("weighted_laplacian: coefficients must live on faces");
  return assemble_cell_laplacian(grid(), phase_rule_, &cx, &cy);
}

CsrMatrix StencilContext::lorentz(const VectorField& b) const {
  const GridSpec& g = grid();
  const int nx = g.nx, ny = g.ny;
  CsrBuilder bld(layout_.faces(), layout_.nodes());
  // Face row gets 1/2 of each adjacent cell, which gets 1/4 of each corner node.
  auto add_cell = [&](int r, int ci, int cj, double coef) {
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) bld.add(r, layout_.node(ci + di, cj + dj), 0.125 * coef);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const int r = layout_.uface(i, j);
      add_cell(r, i - 1, j, b.y(i - 1, j));
      add_cell(r, i, j, b.y(i, j));
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int r = layout_.vface(i, j);
      add_cell(r, i, j - 1, -b.x(i, j - 1));
      add_cell(r, i, j, -b.x(i, j));
    }
  return bld.build();
}

CsrMatrix StencilContext::advection(const VectorField& vel) const { return assemble_advection(layout_, vel); }

CsrMatrix StencilContext::advection_skew(const VectorField& vel) const {
  return skew_part(assemble_advection(layout_, vel));
}

}  // namespace chmhd
