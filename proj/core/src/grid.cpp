#include "chmhd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chmhd {

GridSpec::GridSpec(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
  if (nx < 4 || ny < 4)
    throw ConfigError("grid needs at least 4 cells per direction, got " + std::to_string(nx) + "x" +
                      std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw ConfigError("grid extents must be positive and finite");
}

const char* to_string(Location loc) {
  switch (loc) {
    case Location::cell: return "cell";
    case Location::node: return "node";
    case Location::xface: return "xface";
    case Location::yface: return "yface";
  }
  return "?";
}

Field::Field(const GridSpec& grid, Location loc, double value) : grid_(grid), loc_(loc) {
  ni_ = grid.nx + ((loc == Location::node || loc == Location::xface) ? 1 : 0);
  nj_ = grid.ny + ((loc == Location::node || loc == Location::yface) ? 1 : 0);
  stride_ = static_cast<std::size_t>(ni_) + 2;
  data_.assign(stride_ * (static_cast<std::size_t>(nj_) + 2), value);
}

double Field::x(int i) const noexcept {
  const bool centred = loc_ == Location::cell || loc_ == Location::yface;
  return (i + (centred ? 0.5 : 0.0)) * grid_.dx();
}

double Field::y(int j) const noexcept {
  const bool centred = loc_ == Location::cell || loc_ == Location::xface;
  return (j + (centred ? 0.5 : 0.0)) * grid_.dy();
}

std::vector<double> Field::interior() const {
  std::vector<double> out;
  out.reserve(interior_size());
  for (int j = 0; j < nj_; ++j)
    for (int i = 0; i < ni_; ++i) out.push_back((*this)(i, j));
  return out;
}

void Field::set_interior(std::span<const double> values) {
  if (values.size() != interior_size())
    throw std::invalid_argument("set_interior: size mismatch");
  std::size_t k = 0;
  for (int j = 0; j < nj_; ++j)
    for (int i = 0; i < ni_; ++i) (*this)(i, j) = values[k++];
}

void Field::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

VectorField VectorField::mac(const GridSpec& grid) {
  return {VectorKind::mac, Field(grid, Location::xface), Field(grid, Location::yface)};
}

VectorField VectorField::cell(const GridSpec& grid) {
  return {VectorKind::cell, Field(grid, Location::cell), Field(grid, Location::cell)};
}

BoundaryRule BoundaryRule::neumann() {
  BoundaryRule r;
  r.sides.fill(SideRule::neumann());
  return r;
}

BoundaryRule BoundaryRule::dirichlet() {
  BoundaryRule r;
  r.sides.fill(SideRule::dirichlet());
  return r;
}

BoundaryRule BoundaryRule::periodic() {
  BoundaryRule r;
  r.sides.fill(SideRule::periodic());
  return r;
}

bool BoundaryRule::periodic_x() const {
  return (*this)[Side::left].kind == SideRule::Kind::periodic;
}

bool BoundaryRule::periodic_y() const {
  return (*this)[Side::bottom].kind == SideRule::Kind::periodic;
}

bool BoundaryRule::homogeneous() const {
  return std::all_of(sides.begin(), sides.end(), [](const SideRule& s) { return !s.data; });
}

void BoundaryRule::validate() const {
  auto per = [&](Side s) { return (*this)[s].kind == SideRule::Kind::periodic; };
  if (per(Side::left) != per(Side::right))
    throw ConfigError("periodic boundary must be declared on both left and right sides");
  if (per(Side::bottom) != per(Side::top))
    throw ConfigError("periodic boundary must be declared on both bottom and top sides");
}

MagneticRule MagneticRule::tangential(SideData tangential, SideData normal_flux) {
  MagneticRule r;
  // b_x: normal on left/right, tangential on bottom/top.
  r.bx[Side::left] = SideRule::neumann(normal_flux.left);
  r.bx[Side::right] = SideRule::neumann(normal_flux.right);
  r.bx[Side::bottom] = SideRule::dirichlet(tangential.bottom);
  r.bx[Side::top] = SideRule::dirichlet(tangential.top);
  // b_y: tangential on left/right, normal on bottom/top.
  r.by[Side::left] = SideRule::dirichlet(tangential.left);
  r.by[Side::right] = SideRule::dirichlet(tangential.right);
  r.by[Side::bottom] = SideRule::neumann(normal_flux.bottom);
  r.by[Side::top] = SideRule::neumann(normal_flux.top);
  return r;
}

namespace {

// Ghost value for a cell-centred sample one spacing outside the boundary.
double cell_ghost(const SideRule& rule, double inside, double wrapped, double h, double s, double t) {
  switch (rule.kind) {
    case SideRule::Kind::periodic: return wrapped;
    case SideRule::Kind::neumann: return inside + h * rule.value(s, t);
    case SideRule::Kind::dirichlet: return 2.0 * rule.value(s, t) - inside;
  }
  return inside;
}

void fill_cell_ghosts(Field& f, const BoundaryRule& rule, double t) {
  const int ni = f.ni(), nj = f.nj();
  const double dx = f.grid().dx(), dy = f.grid().dy();
  for (int j = 0; j < nj; ++j) {
    const double s = f.y(j);
    f(-1, j) = cell_ghost(rule[Side::left], f(0, j), f(ni - 1, j), dx, s, t);
    f(ni, j) = cell_ghost(rule[Side::right], f(ni - 1, j), f(0, j), dx, s, t);
  }
  for (int i = -1; i <= ni; ++i) {
    const double s = f.x(i);
    f(i, -1) = cell_ghost(rule[Side::bottom], f(i, 0), f(i, nj - 1), dy, s, t);
    f(i, nj) = cell_ghost(rule[Side::top], f(i, nj - 1), f(i, 0), dy, s, t);
  }
}

void fill_node_ghosts(Field& f, const BoundaryRule& rule, double t) {
  const int ni = f.ni(), nj = f.nj();
  const double dx = f.grid().dx(), dy = f.grid().dy();
  auto side = [&](const SideRule& r, double& boundary, double& ghost, double mirror, double opposite,
                  double opposite_next, double h, double s) {
    switch (r.kind) {
      case SideRule::Kind::periodic:
        boundary = opposite;
        ghost = opposite_next;
        break;
      case SideRule::Kind::neumann: ghost = mirror + 2.0 * h * r.value(s, t); break;
      case SideRule::Kind::dirichlet:
        boundary = r.value(s, t);
        ghost = 2.0 * boundary - mirror;
        break;
    }
  };
  for (int j = 0; j < nj; ++j) {
    const double s = f.y(j);
    if (rule.periodic_x()) {
      f(ni - 1, j) = f(0, j);
      f(-1, j) = f(ni - 2, j);
      f(ni, j) = f(1, j);
    } else {
      side(rule[Side::left], f(0, j), f(-1, j), f(1, j), 0.0, 0.0, dx, s);
      side(rule[Side::right], f(ni - 1, j), f(ni, j), f(ni - 2, j), 0.0, 0.0, dx, s);
    }
  }
  for (int i = -1; i <= ni; ++i) {
    const double s = f.x(i);
    if (rule.periodic_y()) {
      f(i, nj - 1) = f(i, 0);
      f(i, -1) = f(i, nj - 2);
      f(i, nj) = f(i, 1);
    } else {
      side(rule[Side::bottom], f(i, 0), f(i, -1), f(i, 1), 0.0, 0.0, dy, s);
      side(rule[Side::top], f(i, nj - 1), f(i, nj), f(i, nj - 2), 0.0, 0.0, dy, s);
    }
  }
}

}  // namespace

void apply_boundary(Field& field, const BoundaryRule& rule, double time) {
  rule.validate();
  switch (field.location()) {
    case Location::cell: fill_cell_ghosts(field, rule, time); break;
    case Location::node: fill_node_ghosts(field, rule, time); break;
    default:
      throw ConfigError(std::string("scalar boundary rule cannot be applied to a ") +
                        to_string(field.location()) + " field");
  }
}

void apply_boundary(VectorField& b, const MagneticRule& rule, double time) {
  if (b.kind != VectorKind::cell) throw ConfigError("magnetic boundary rule needs a cell vector field");
  for (const BoundaryRule* r : {&rule.bx, &rule.by}) {
    r->validate();
    if (r->periodic_x() || r->periodic_y())
      throw ConfigError("magnetic field supports wall boundaries only");
  }
  fill_cell_ghosts(b.x, rule.bx, time);
  fill_cell_ghosts(b.y, rule.by, time);
}

void apply_boundary(VectorField& v, const VelocityRule& rule) {
  if (v.kind != VectorKind::mac) throw ConfigError("velocity boundary rule needs a MAC field");
  auto alpha = [&](Side s) { return rule[s] == Wall::no_slip ? -1.0 : 1.0; };
  Field& u = v.x;
  const int nx = v.x.grid().nx, ny = v.x.grid().ny;
  for (int j = 0; j < ny; ++j) {
    u(0, j) = 0.0;
    u(nx, j) = 0.0;
    u(-1, j) = -u(1, j);
    u(nx + 1, j) = -u(nx - 1, j);
  }
  for (int i = -1; i <= nx + 1; ++i) {
    u(i, -1) = alpha(Side::bottom) * u(i, 0);
    u(i, ny) = alpha(Side::top) * u(i, ny - 1);
  }
  Field& w = v.y;
  for (int i = 0; i < nx; ++i) {
    w(i, 0) = 0.0;
    w(i, ny) = 0.0;
    w(i, -1) = -w(i, 1);
    w(i, ny + 1) = -w(i, ny - 1);
  }
  for (int j = -1; j <= ny + 1; ++j) {
    w(-1, j) = alpha(Side::left) * w(0, j);
    w(nx, j) = alpha(Side::right) * w(nx - 1, j);
  }
}

double integrate(const Field& f) {
  if (f.location() != Location::cell) throw ConfigError("integrate expects a cell-centred field");
  double sum = 0.0;
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) sum += f(i, j);
  return sum * f.grid().cell_area();
}

double weight(const Field& f, int i, int j) noexcept {
  double w = 1.0;
  const bool edge_i = (i == 0 || i == f.ni() - 1);
  const bool edge_j = (j == 0 || j == f.nj() - 1);
  switch (f.location()) {
    case Location::cell: break;
    case Location::node:
      if (edge_i) w *= 0.5;
      if (edge_j) w *= 0.5;
      break;
    case Location::xface:
      if (edge_i) w *= 0.5;
      break;
    case Location::yface:
      if (edge_j) w *= 0.5;
      break;
  }
  return w;
}

double inner(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("inner: fields differ in shape");
  double sum = 0.0;
  for (int j = 0; j < a.nj(); ++j)
    for (int i = 0; i < a.ni(); ++i) sum += weight(a, i, j) * a(i, j) * b(i, j);
  return sum * a.grid().cell_area();
}

double inner(const VectorField& a, const VectorField& b) { return inner(a.x, b.x) + inner(a.y, b.y); }

double norm_l2(const Field& f) { return std::sqrt(inner(f, f)); }
double norm_l2(const VectorField& f) { return std::sqrt(inner(f, f)); }

double max_abs(const Field& f) {
  double m = 0.0;
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) m = std::max(m, std::abs(f(i, j)));
  return m;
}

}  // namespace chmhd
