#include "chmhd/mms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "chmhd/operators.hpp"

namespace chmhd::mms {

namespace {

constexpr double pi = std::numbers::pi;

// S(s) = sin^2(pi s) and its derivatives.
struct Sin2 {
  double v, d1, d2, d3, d4;
  explicit Sin2(double s) {
    const double sn = std::sin(pi * s), s2 = std::sin(2 * pi * s), c2 = std::cos(2 * pi * s);
    v = sn * sn;
    d1 = pi * s2;
    d2 = 2 * pi * pi * c2;
    d3 = -4 * pi * pi * pi * s2;
    d4 = -8 * pi * pi * pi * pi * c2;
  }
};

// g(s) = s^2 (s-1)^2 and its derivatives.
struct Quartic {
  double v, d1, d2, d3;
  explicit Quartic(double s)
      : v(s * s * (s - 1) * (s - 1)),
        d1(4 * s * s * s - 6 * s * s + 2 * s),
        d2(12 * s * s - 12 * s + 2),
        d3(24 * s - 12) {}
};

// Velocity and its first and second derivatives; scaled by cos t.
struct Vel {
  double u, u_x, u_y, u_lap, v, v_x, v_y, v_lap;
  Vel(double x, double y, double c) {
    const Quartic gx(x), gy(y);
    u = 0.5 * gx.v * gy.d1 * c;
    u_x = 0.5 * gx.d1 * gy.d1 * c;
    u_y = 0.5 * gx.v * gy.d2 * c;
    u_lap = 0.5 * (gx.d2 * gy.d1 + gx.v * gy.d3) * c;
    v = -0.5 * gx.d1 * gy.v * c;
    v_x = -0.5 * gx.d2 * gy.v * c;
    v_y = -0.5 * gx.d1 * gy.d1 * c;
    v_lap = -0.5 * (gx.d3 * gy.v + gx.d1 * gy.d2) * c;
  }
};

// Magnetic field and derivatives; scaled by cos t.
struct Mag {
  double b1, b2, b1_x, b1_y, b2_x, b2_y, j, j_x, j_y;
  Mag(double x, double y, double c) {
    const double sx = std::sin(pi * x), cx = std::cos(pi * x), sy = std::sin(pi * y), cy = std::cos(pi * y);
    b1 = sx * cy * c;
    b2 = -cx * sy * c;
    b1_x = pi * cx * cy * c;
    b1_y = -pi * sx * sy * c;
    b2_x = pi * sx * sy * c;
    b2_y = -pi * cx * cy * c;
    j = 2 * pi * sx * sy * c;
    j_x = 2 * pi * pi * cx * sy * c;
    j_y = 2 * pi * pi * sx * cy * c;
  }
};

constexpr std::array<double, 9> kD1{1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                                    4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
constexpr std::array<double, 9> kD2{-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                    8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};

// Eighth-order central differences of a function of the offset.
template <class Fn>
double fd1(Fn&& f, double h) {
  double s = 0.0;
  for (int k = -4; k <= 4; ++k) s += kD1[k + 4] * f(k * h);
  return s / h;
}

template <class Fn>
double fd2(Fn&& f, double h) {
  double s = 0.0;
  for (int k = -4; k <= 4; ++k) s += kD2[k + 4] * f(k * h);
  return s / (h * h);
}

}  // namespace

ExactSolution::ExactSolution(ModelParams params, double rho0) : params_(params), rho0_(rho0) {
  if (params_.sigma_pair) throw ConfigError("the manufactured solution assumes a single conductivity");
  if (!(rho0 > 0.0)) throw ConfigError("rho0 must be positive");
}

ExactSolution::Phase ExactSolution::phase(double x, double y, double t) const {
  const Sin2 sx(x), sy(y);
  const double st = std::sin(t), eps = params_.eps;
  Phase ph{};
  ph.phi = sx.v * sy.v * st;
  ph.phi_x = sx.d1 * sy.v * st;
  ph.phi_y = sx.v * sy.d1 * st;
  ph.lap = (sx.d2 * sy.v + sx.v * sy.d2) * st;
  const double lap_x = (sx.d3 * sy.v + sx.d1 * sy.d2) * st;
  const double lap_y = (sx.d2 * sy.d1 + sx.v * sy.d3) * st;
  const double bilap = (sx.d4 * sy.v + 2 * sx.d2 * sy.d2 + sx.v * sy.d4) * st;
  const double fp = (3 * ph.phi * ph.phi - 1) / eps;
  const double fpp = 6 * ph.phi / eps;
  ph.w_x = -eps * lap_x + fp * ph.phi_x;
  ph.w_y = -eps * lap_y + fp * ph.phi_y;
  ph.lap_w = -eps * bilap + fpp * (ph.phi_x * ph.phi_x + ph.phi_y * ph.phi_y) + fp * ph.lap;
  return ph;
}

double ExactSolution::phi(double x, double y, double t) const {
  const double a = std::sin(pi * x), b = std::sin(pi * y);
  return a * a * b * b * std::sin(t);
}

double ExactSolution::w(double x, double y, double t) const {
  const Phase ph = phase(x, y, t);
  return -params_.eps * ph.lap + ph.phi * (ph.phi * ph.phi - 1) / params_.eps;
}

double ExactSolution::w_x(double x, double y, double t) const { return phase(x, y, t).w_x; }
double ExactSolution::w_y(double x, double y, double t) const { return phase(x, y, t).w_y; }

double ExactSolution::u(double x, double y, double t) const { return Vel(x, y, std::cos(t)).u; }
double ExactSolution::v(double x, double y, double t) const { return Vel(x, y, std::cos(t)).v; }
double ExactSolution::p(double x, double y, double t) const { return (2 * x - 1) * (2 * y - 1) * std::cos(t); }
double ExactSolution::b1(double x, double y, double t) const { return Mag(x, y, std::cos(t)).b1; }
double ExactSolution::b2(double x, double y, double t) const { return Mag(x, y, std::cos(t)).b2; }

double ExactSolution::psi(double x, double y, double t) const {
  return 0.5 * Quartic(x).v * Quartic(y).v * std::cos(t);
}

double ExactSolution::phase_source(double x, double y, double t) const {
  const Phase ph = phase(x, y, t);
  const Vel vel(x, y, std::cos(t));
  const double phi_t = Sin2(x).v * Sin2(y).v * std::cos(t);
  return phi_t + vel.u * ph.phi_x + vel.v * ph.phi_y - params_.mobility * ph.lap_w;
}

double ExactSolution::chem_source(double, double, double) const { return 0.0; }

double ExactSolution::momentum_source_x(double x, double y, double t) const {
  const double c = std::cos(t);
  const Vel vel(x, y, c), vt(x, y, -std::sin(t));
  const Mag mag(x, y, c);
  const Phase ph = phase(x, y, t);
  return rho0_ * (vt.u + vel.u * vel.u_x + vel.v * vel.u_y) - params_.nu * vel.u_lap + mag.b2 * mag.j / params_.mu +
         2 * (2 * y - 1) * c + params_.lambda * ph.phi * ph.w_x;
}

double ExactSolution::momentum_source_y(double x, double y, double t) const {
  const double c = std::cos(t);
  const Vel vel(x, y, c), vt(x, y, -std::sin(t));
  const Mag mag(x, y, c);
  const Phase ph = phase(x, y, t);
  return rho0_ * (vt.v + vel.u * vel.v_x + vel.v * vel.v_y) - params_.nu * vel.v_lap - mag.b1 * mag.j / params_.mu +
         2 * (2 * x - 1) * c + params_.lambda * ph.phi * ph.w_y;
}

double ExactSolution::magnetic_source_x(double x, double y, double t) const {
  const double c = std::cos(t);
  const Vel vel(x, y, c);
  const Mag mag(x, y, c), mt(x, y, -std::sin(t));
  const double e_y = vel.u_y * mag.b2 + vel.u * mag.b2_y - vel.v_y * mag.b1 - vel.v * mag.b1_y;
  return mt.b1 + mag.j_y / (params_.sigma * params_.mu) - e_y;
}

double ExactSolution::magnetic_source_y(double x, double y, double t) const {
  const double c = std::cos(t);
  const Vel vel(x, y, c);
  const Mag mag(x, y, c), mt(x, y, -std::sin(t));
  const double e_x = vel.u_x * mag.b2 + vel.u * mag.b2_x - vel.v_x * mag.b1 - vel.v * mag.b1_x;
  return mt.b2 - mag.j_x / (params_.sigma * params_.mu) + e_x;
}

Sources ExactSolution::sources() const {
  Sources s;
  s.phase = [ex = *this](double x, double y, double t) { return ex.phase_source(x, y, t); };
  s.momentum_x = [ex = *this](double x, double y, double t) { return ex.momentum_source_x(x, y, t); };
  s.momentum_y = [ex = *this](double x, double y, double t) { return ex.momentum_source_y(x, y, t); };
  s.magnetic_x = [ex = *this](double x, double y, double t) { return ex.magnetic_source_x(x, y, t); };
  s.magnetic_y = [ex = *this](double x, double y, double t) { return ex.magnetic_source_y(x, y, t); };
  return s;
}

Sampled exact_at(const ExactSolution& ex, const GridSpec& grid, double t, FieldId which) {
  if (t < 0.0) throw ConfigError("exact solution sampled at negative time");
  switch (which) {
    case FieldId::phi:
    case FieldId::w:
    case FieldId::p: {
      Field f(grid, Location::cell);
      if (which == FieldId::phi) f.sample([&](double x, double y) { return ex.phi(x, y, t); });
      if (which == FieldId::w) f.sample([&](double x, double y) { return ex.w(x, y, t); });
      if (which == FieldId::p) f.sample([&](double x, double y) { return ex.p(x, y, t); });
      return f;
    }
    case FieldId::v: {
      VectorField v = VectorField::mac(grid);
      v.x.sample([&](double x, double y) { return ex.u(x, y, t); });
      v.y.sample([&](double x, double y) { return ex.v(x, y, t); });
      return v;
    }
    case FieldId::b: {
      VectorField b = VectorField::cell(grid);
      b.x.sample([&](double x, double y) { return ex.b1(x, y, t); });
      b.y.sample([&](double x, double y) { return ex.b2(x, y, t); });
      return b;
    }
  }
  throw ConfigError("unknown field id");
}

BoundarySet boundary_data(const ExactSolution& ex) {
  BoundarySet bs;
  bs.phase = BoundaryRule::neumann();
  bs.pressure = BoundaryRule::neumann();
  bs.velocity = VelocityRule::no_slip();

  auto wflux = [ex](double x, double y, double t, double nx, double ny) {
    return nx * ex.w_x(x, y, t) + ny * ex.w_y(x, y, t);
  };
  bs.chem = BoundaryRule::neumann();
  bs.chem[Side::left].data = [wflux](double s, double t) { return wflux(0.0, s, t, -1.0, 0.0); };
  bs.chem[Side::right].data = [wflux](double s, double t) { return wflux(1.0, s, t, 1.0, 0.0); };
  bs.chem[Side::bottom].data = [wflux](double s, double t) { return wflux(s, 0.0, t, 0.0, -1.0); };
  bs.chem[Side::top].data = [wflux](double s, double t) { return wflux(s, 1.0, t, 0.0, 1.0); };

  SideData tangential{
      [ex](double s, double t) { return ex.b2(0.0, s, t); },
      [ex](double s, double t) { return ex.b2(1.0, s, t); },
      [ex](double s, double t) { return ex.b1(s, 0.0, t); },
      [ex](double s, double t) { return ex.b1(s, 1.0, t); },
  };
  // Outward derivative of the normal component, from div b = 0.
  SideData normal{
      [](double s, double t) { return -Mag(0.0, s, std::cos(t)).b1_x; },
      [](double s, double t) { return Mag(1.0, s, std::cos(t)).b1_x; },
      [](double s, double t) { return -Mag(s, 0.0, std::cos(t)).b2_y; },
      [](double s, double t) { return Mag(s, 1.0, std::cos(t)).b2_y; },
  };
  bs.magnetic = MagneticRule::tangential(std::move(tangential), std::move(normal));
  return bs;
}

Problem make_problem(const ExactSolution& ex, int n, const SchemeConfig& scheme) {
  const BoundarySet bs = boundary_data(ex);
  Problem pb;
  pb.grid = GridSpec(n, n);
  pb.params = ex.params();
  pb.scheme = scheme;
  pb.phase_rule = bs.phase;
  pb.velocity_rule = bs.velocity;
  pb.magnetic_rule = bs.magnetic;
  pb.sources = ex.sources();
  return pb;
}

State initial_state(const Integrator& integ, const ExactSolution& ex, double t0) {
  const GridSpec& g = integ.problem().grid;
  Field psi(g, Location::node);
  psi.sample([&](double x, double y) { return ex.psi(x, y, t0); });
  const VectorField v0 = curl_of_node_potential(psi);
  const Field phi0 = std::get<Field>(exact_at(ex, g, t0, FieldId::phi));
  const Field p0 = std::get<Field>(exact_at(ex, g, t0, FieldId::p));
  const VectorField b0 = std::get<VectorField>(exact_at(ex, g, t0, FieldId::b));
  return integ.initial_state(phi0, v0, p0, b0, t0);
}

double Residuals::max() const noexcept { return std::max({phase, chem, momentum, magnetic, div_v, div_b}); }

Residuals residual_oracle(const ExactSolution& ex, int n, double t) {
  const ModelParams& prm = ex.params();
  // Stencil spacing of two grid cells keeps the roundoff of the nested
  // fourth derivatives below the truncation error.
  const double h = 2.0 / n;
  const double dx = 1.0 / n;
  auto phi = [&](double x, double y, double s) { return ex.phi(x, y, s); };
  auto wfd = [&](double x, double y, double s) {
    const double lap = fd2([&](double d) { return phi(x + d, y, s); }, h) +
                       fd2([&](double d) { return phi(x, y + d, s); }, h);
    const double f = phi(x, y, s);
    return -prm.eps * lap + f * (f * f - 1) / prm.eps;
  };
  auto jfd = [&](double x, double y, double s) {
    return fd1([&](double d) { return ex.b2(x + d, y, s); }, h) - fd1([&](double d) { return ex.b1(x, y + d, s); }, h);
  };
  auto efn = [&](double x, double y, double s) {
    return ex.u(x, y, s) * ex.b2(x, y, s) - ex.v(x, y, s) * ex.b1(x, y, s);
  };
  const double r0 = ex.rho0();

  Residuals r;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) * dx, y = (j + 0.5) * dx;
      const double phi_t = fd1([&](double d) { return phi(x, y, t + d); }, h);
      const double flux = fd1([&](double d) { return phi(x + d, y, t) * ex.u(x + d, y, t); }, h) +
                          fd1([&](double d) { return phi(x, y + d, t) * ex.v(x, y + d, t); }, h);
      const double lap_w = fd2([&](double d) { return wfd(x + d, y, t); }, h) +
                           fd2([&](double d) { return wfd(x, y + d, t); }, h);
      r.phase = std::max(r.phase, std::abs(phi_t + flux - prm.mobility * lap_w - ex.phase_source(x, y, t)));
      r.chem = std::max(r.chem, std::abs(wfd(x, y, t) - ex.w(x, y, t) - ex.chem_source(x, y, t)));

      const double f = phi(x, y, t);
      const double j_c = jfd(x, y, t);
      const double w_x = fd1([&](double d) { return wfd(x + d, y, t); }, h);
      const double w_y = fd1([&](double d) { return wfd(x, y + d, t); }, h);
      const double mx =
          r0 * (fd1([&](double d) { return ex.u(x, y, t + d); }, h) +
                fd1([&](double d) { return ex.u(x + d, y, t) * ex.u(x + d, y, t); }, h) +
                fd1([&](double d) { return ex.u(x, y + d, t) * ex.v(x, y + d, t); }, h)) -
          prm.nu * (fd2([&](double d) { return ex.u(x + d, y, t); }, h) +
                    fd2([&](double d) { return ex.u(x, y + d, t); }, h)) +
          ex.b2(x, y, t) * j_c / prm.mu + fd1([&](double d) { return ex.p(x + d, y, t); }, h) + prm.lambda * f * w_x;
      const double my =
          r0 * (fd1([&](double d) { return ex.v(x, y, t + d); }, h) +
                fd1([&](double d) { return ex.u(x + d, y, t) * ex.v(x + d, y, t); }, h) +
                fd1([&](double d) { return ex.v(x, y + d, t) * ex.v(x, y + d, t); }, h)) -
          prm.nu * (fd2([&](double d) { return ex.v(x + d, y, t); }, h) +
                    fd2([&](double d) { return ex.v(x, y + d, t); }, h)) -
          ex.b1(x, y, t) * j_c / prm.mu + fd1([&](double d) { return ex.p(x, y + d, t); }, h) + prm.lambda * f * w_y;
      r.momentum = std::max({r.momentum, std::abs(mx - ex.momentum_source_x(x, y, t)),
                             std::abs(my - ex.momentum_source_y(x, y, t))});

      const double sm = prm.sigma * prm.mu;
      const double bx = fd1([&](double d) { return ex.b1(x, y, t + d); }, h) +
                        fd1([&](double d) { return jfd(x, y + d, t); }, h) / sm -
                        fd1([&](double d) { return efn(x, y + d, t); }, h);
      const double by = fd1([&](double d) { return ex.b2(x, y, t + d); }, h) -
                        fd1([&](double d) { return jfd(x + d, y, t); }, h) / sm +
                        fd1([&](double d) { return efn(x + d, y, t); }, h);
      r.magnetic = std::max({r.magnetic, std::abs(bx - ex.magnetic_source_x(x, y, t)),
                             std::abs(by - ex.magnetic_source_y(x, y, t))});

      r.div_v = std::max(r.div_v, std::abs(fd1([&](double d) { return ex.u(x + d, y, t); }, h) +
                                           fd1([&](double d) { return ex.v(x, y + d, t); }, h)));
      r.div_b = std::max(r.div_b, std::abs(fd1([&](double d) { return ex.b1(x + d, y, t); }, h) +
                                           fd1([&](double d) { return ex.b2(x, y + d, t); }, h)));
    }
  return r;
}

}  // namespace chmhd::mms
