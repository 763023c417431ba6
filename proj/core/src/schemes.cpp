#include "chmhd/schemes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "chmhd/spectral.hpp"

namespace chmhd {

namespace {

std::vector<double> sample_cells(const GridSpec& g, const PointFn& fn, double t) {
  std::vector<double> out(g.cells(), 0.0);
  if (!fn) return out;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out[j * g.nx + i] = fn((i + 0.5) * g.dx(), (j + 0.5) * g.dy(), t);
  return out;
}

void add_face_samples(const Layout& lay, const PointFn& fx, const PointFn& fy, double t, std::vector<double>& rhs) {
  const GridSpec& g = lay.grid;
  if (fx)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) rhs[lay.uface(i, j)] += fx(i * g.dx(), (j + 0.5) * g.dy(), t);
  if (fy)
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) rhs[lay.vface(i, j)] += fy((i + 0.5) * g.dx(), j * g.dy(), t);
}

// [[a, b], [c, d]] for square blocks of equal size.
CsrMatrix block2(const CsrMatrix& a, const CsrMatrix& b, const CsrMatrix& c, const CsrMatrix& d) {
  const int n = a.rows;
  CsrMatrix m;
  m.rows = m.cols = 2 * n;
  m.ptr.assign(static_cast<std::size_t>(2 * n) + 1, 0);
  auto append_row = [&](const CsrMatrix& left, const CsrMatrix& right, int i) {
    for (int k = left.ptr[i]; k < left.ptr[i + 1]; ++k) {
      m.col.push_back(left.col[k]);
      m.val.push_back(left.val[k]);
    }
    for (int k = right.ptr[i]; k < right.ptr[i + 1]; ++k) {
      m.col.push_back(n + right.col[k]);
      m.val.push_back(right.val[k]);
    }
  };
  for (int i = 0; i < n; ++i) {
    append_row(a, b, i);
    m.ptr[i + 1] = static_cast<int>(m.col.size());
  }
  for (int i = 0; i < n; ++i) {
    append_row(c, d, i);
    m.ptr[n + i + 1] = static_cast<int>(m.col.size());
  }
  return m;
}

SpectralAxis wall_axis(Wall a, Wall b, bool& ok) {
  if (a != b) ok = false;
  return a == Wall::no_slip ? SpectralAxis::dirichlet_cell : SpectralAxis::neumann_cell;
}

void require(const SolveReport& rep, const char* what) {
  if (!rep.converged) throw SolverError(std::string(what) + " solve broke down", rep);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

State State::zeros(const GridSpec& grid, bool with_aux) {
  State s{Field(grid, Location::cell),
          Field(grid, Location::cell),
          VectorField::mac(grid),
          VectorField::mac(grid),
          Field(grid, Location::cell),
          VectorField::cell(grid),
          std::nullopt,
          0.0,
          0};
  if (with_aux) s.n_aux = Field(grid, Location::cell);
  return s;
}

Integrator::Integrator(Problem problem)
    : problem_(std::move(problem)), ctx_(problem_.grid, problem_.phase_rule, problem_.velocity_rule) {
  warnings_ = problem_.params.validate(problem_.grid);
  for (auto& w : problem_.scheme.validate(problem_.params)) warnings_.push_back(std::move(w));
  if (!(problem_.rho0 > 0.0)) throw ConfigError("rho0 must be positive");
  for (const BoundaryRule* r : {&problem_.magnetic_rule.bx, &problem_.magnetic_rule.by})
    if (r->periodic_x() || r->periodic_y()) throw ConfigError("magnetic field supports wall boundaries only");

  const GridSpec& g = problem_.grid;
  const BoundaryRule& pr = problem_.phase_rule;
  phase_basis_ = std::make_unique<SpectralBasis>(
      g.nx, g.dx(), pr.periodic_x() ? SpectralAxis::periodic : SpectralAxis::neumann_cell, g.ny, g.dy(),
      pr.periodic_y() ? SpectralAxis::periodic : SpectralAxis::neumann_cell);
  pressure_basis_ = std::make_unique<SpectralBasis>(g.nx, g.dx(), SpectralAxis::neumann_cell, g.ny, g.dy(),
                                                    SpectralAxis::neumann_cell);
  const VelocityRule& vr = problem_.velocity_rule;
  bool ok = true;
  const SpectralAxis uy = wall_axis(vr[Side::bottom], vr[Side::top], ok);
  const SpectralAxis vx = wall_axis(vr[Side::left], vr[Side::right], ok);
  if (ok) {
    u_basis_ = std::make_unique<SpectralBasis>(g.nx, g.dx(), SpectralAxis::dirichlet_node, g.ny, g.dy(), uy);
    v_basis_ = std::make_unique<SpectralBasis>(g.nx, g.dx(), vx, g.ny, g.dy(), SpectralAxis::dirichlet_node);
  } else {
    warnings_.push_back("opposite walls differ in type; momentum solve falls back to Jacobi preconditioning");
  }
}

Integrator::~Integrator() = default;

State Integrator::initial_state(const Field& phi0, const VectorField& v0, const Field& p0, const VectorField& b0,
                                double t0) const {
  const ModelParams& prm = problem_.params;
  State s = State::zeros(problem_.grid, problem_.scheme.scheme == Scheme::II);
  s.phi = phi0;
  s.v = v0;
  s.v_tilde = v0;
  s.p = p0;
  s.b = b0;
  s.time = t0;
  apply_boundary(s.phi, problem_.phase_rule, t0);
  apply_boundary(s.v, problem_.velocity_rule);
  apply_boundary(s.v_tilde, problem_.velocity_rule);
  apply_boundary(s.b, problem_.magnetic_rule, t0);
  apply_boundary(s.p, BoundaryRule::neumann(), t0);
  const DoubleWell well{prm.eps, problem_.scheme.scheme == Scheme::I};
  const Field lap = laplacian(s.phi);
  for (int j = 0; j < s.w.nj(); ++j)
    for (int i = 0; i < s.w.ni(); ++i) s.w(i, j) = -prm.eps * lap(i, j) + well.f(s.phi(i, j));
  apply_boundary(s.w, problem_.phase_rule, t0);
  if (s.n_aux) s.n_aux = n_init(s.phi, problem_.scheme.C, well);
  return s;
}

Integrator::PhaseResult Integrator::phase_solve(const State& prev, const std::vector<double>& pcoef,
                                                const std::vector<double>& q) const {
  const GridSpec& g = problem_.grid;
  const ModelParams& prm = problem_.params;
  const double dt = problem_.scheme.dt;
  const double t_new = prev.time + dt;
  const int n = static_cast<int>(g.cells());

  Field phi = prev.phi;
  apply_boundary(phi, problem_.phase_rule, prev.time);

  // Face mobility M + dt*lambda*(phi^2 averaged to the face).
  Field cx(g, Location::xface), cy(g, Location::yface);
  const double stab = dt * prm.lambda;
  double csum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      cx(i, j) = prm.mobility + stab * 0.5 * (phi(i - 1, j) * phi(i - 1, j) + phi(i, j) * phi(i, j));
      csum += cx(i, j);
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      cy(i, j) = prm.mobility + stab * 0.5 * (phi(i, j - 1) * phi(i, j - 1) + phi(i, j) * phi(i, j));
      csum += cy(i, j);
    }
  const double cbar = csum / ((g.nx + 1) * g.ny + g.nx * (g.ny + 1));

  const CsrMatrix k = ctx_.weighted_laplacian(cx, cy);
  CsrMatrix a21 = add(ctx_.laplacian(), diagonal_matrix(pcoef), prm.eps, -1.0);
  const CsrMatrix a = block2(identity(n), add(k, k, -dt, 0.0), a21, identity(n));

  // The phase row is scaled by dt so its residual is a mass defect.
  std::vector<double> flux = pack_velocity(face_average(phi));
  const std::vector<double> vel = pack_velocity(prev.v);
  for (std::size_t f = 0; f < flux.size(); ++f) flux[f] *= vel[f];
  const std::vector<double> div_flux = spmv(ctx_.div(), flux);
  const std::vector<double> src_phase = sample_cells(g, problem_.sources.phase, t_new);
  const std::vector<double> src_chem = sample_cells(g, problem_.sources.chem, t_new);
  const std::vector<double> phi_old = phi.interior();

  std::vector<double> rhs(2 * n), x(2 * n);
  for (int c = 0; c < n; ++c) {
    rhs[c] = phi_old[c] - dt * div_flux[c] + dt * src_phase[c];
    rhs[n + c] = q[c] + src_chem[c];
  }
  const std::vector<double> w_old = prev.w.interior();
  std::copy(phi_old.begin(), phi_old.end(), x.begin());
  std::copy(w_old.begin(), w_old.end(), x.begin() + n);

  // Per-mode inverse of the constant-coefficient block
  // [[1, dt*cbar*lam], [-(eps*lam + pbar), 1]].
  const double pbar = mean(pcoef);
  const SpectralBasis& basis = *phase_basis_;
  auto scratch = std::make_shared<std::vector<double>>(4 * static_cast<std::size_t>(n));
  const double eps = prm.eps;
  const Preconditioner precond = [&basis, scratch, n, dt, cbar, pbar, eps](std::span<const double> r,
                                                                          std::span<double> z) {
    std::span<double> s(*scratch);
    auto r1 = s.subspan(0, n), r2 = s.subspan(n, n), z1 = s.subspan(2 * n, n), z2 = s.subspan(3 * n, n);
    basis.forward(r.subspan(0, n), r1);
    basis.forward(r.subspan(n, n), r2);
    const auto& lam = basis.eigen();
    for (int m = 0; m < n; ++m) {
      const double b12 = dt * cbar * lam[m];
      const double b21 = eps * lam[m] + pbar;
      const double det = 1.0 + b12 * b21;
      z1[m] = (r1[m] - b12 * r2[m]) / det;
      z2[m] = (r2[m] + b21 * r1[m]) / det;
    }
    basis.inverse(z1, z.subspan(0, n));
    basis.inverse(z2, z.subspan(n, n));
  };

  PhaseResult res{Field(g, Location::cell), Field(g, Location::cell), std::nullopt, {}};
  res.report = solve(a, rhs, x, problem_.phase_solver, precond);
  require(res.report, "phase");
  res.phi.set_interior(std::span<const double>(x).subspan(0, n));
  res.w.set_interior(std::span<const double>(x).subspan(n, n));
  apply_boundary(res.phi, problem_.phase_rule, t_new);
  apply_boundary(res.w, problem_.phase_rule, t_new);
  return res;
}

Integrator::PhaseResult Integrator::ch_step_scheme_I(const State& prev) const {
  const ModelParams& prm = problem_.params;
  const double S = problem_.scheme.stabilizer(prm);
  const DoubleWell well{prm.eps, true};
  const std::vector<double> phi = prev.phi.interior();
  std::vector<double> pcoef(phi.size(), S), q(phi.size());
  for (std::size_t c = 0; c < phi.size(); ++c) q[c] = well.f(phi[c]) - S * phi[c];
  return phase_solve(prev, pcoef, q);
}

Integrator::PhaseResult Integrator::ch_step_scheme_II(const State& prev) const {
  if (!prev.n_aux) throw ConfigError("Scheme II needs the IEQ auxiliary in the state");
  const ModelParams& prm = problem_.params;
  const DoubleWell well{prm.eps, false};
  const std::vector<double> phi = prev.phi.interior();
  const std::vector<double> n_old = prev.n_aux->interior();
  std::vector<double> m(phi.size()), pcoef(phi.size()), q(phi.size());
  for (std::size_t c = 0; c < phi.size(); ++c) {
    m[c] = m_ieq(phi[c], problem_.scheme.C, well);
    pcoef[c] = 0.5 * m[c] * m[c];
    q[c] = m[c] * n_old[c] - 0.5 * m[c] * m[c] * phi[c];
  }
  PhaseResult res = phase_solve(prev, pcoef, q);
  const std::vector<double> phi_new = res.phi.interior();
  std::vector<double> n_new(phi.size());
  for (std::size_t c = 0; c < phi.size(); ++c) n_new[c] = n_old[c] + 0.5 * m[c] * (phi_new[c] - phi[c]);
  res.n_aux = Field(problem_.grid, Location::cell);
  res.n_aux->set_interior(n_new);
  apply_boundary(*res.n_aux, BoundaryRule::neumann(), prev.time + problem_.scheme.dt);
  return res;
}

Integrator::PhaseResult Integrator::ch_step_scheme_III(const State& prev) const {
  const double eps = problem_.params.eps;
  const double sp = problem_.scheme.S_prime;
  const std::vector<double> phi = prev.phi.interior();
  std::vector<double> pcoef(phi.size()), q(phi.size());
  for (std::size_t c = 0; c < phi.size(); ++c) {
    const double f = phi[c];
    pcoef[c] = 2.0 / eps * f * f + sp;
    q[c] = f * (f * f - 1.0) / eps - 2.0 / eps * f * f * f - sp * f;
  }
  return phase_solve(prev, pcoef, q);
}

Integrator::PhaseResult Integrator::ch_step(const State& prev) const {
  switch (problem_.scheme.scheme) {
    case Scheme::I: return ch_step_scheme_I(prev);
    case Scheme::II: return ch_step_scheme_II(prev);
    case Scheme::III: return ch_step_scheme_III(prev);
  }
  throw ConfigError("unknown scheme");
}

Integrator::MagneticResult Integrator::magnetic_step(const State& prev, const Field& phi_new) const {
  const GridSpec& g = problem_.grid;
  const Layout& lay = ctx_.layout();
  const ModelParams& prm = problem_.params;
  const double dt = problem_.scheme.dt;
  const double t_new = prev.time + dt;
  const int nb = 2 * lay.cells();
  const double kappa = problem_.lorentz ? dt / (problem_.rho0 * prm.mu) : 0.0;

  // Node weights over sigma*mu, sigma from the node average of phi_new.
  Field phi = phi_new;
  apply_boundary(phi, problem_.phase_rule, t_new);
  const std::vector<double>& wn = ctx_.node_weights();
  std::vector<double> d(lay.nodes());
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double pn = 0.25 * (phi(i - 1, j - 1) + phi(i, j - 1) + phi(i - 1, j) + phi(i, j));
      d[lay.node(i, j)] = wn[lay.node(i, j)] / (prm.sigma_at(pn) * prm.mu);
    }

  // A = I/dt + Cm^T (diag(d) + kappa P^T P) Cm, applied matrix-free.
  const CsrMatrix& cm = ctx_.curl();
  const CsrMatrix& cmt = ctx_.curl_transpose();
  const CsrMatrix p = ctx_.lorentz(prev.b);
  const CsrMatrix pt = transpose(p);
  auto scratch = std::make_shared<std::vector<double>>(static_cast<std::size_t>(lay.nodes()) * 2 + lay.faces());
  const LinearOperator op = [&, scratch](std::span<const double> x, std::span<double> y) {
    std::span<double> s(*scratch);
    auto curl = s.subspan(0, lay.nodes()), node = s.subspan(lay.nodes(), lay.nodes());
    auto face = s.subspan(2 * lay.nodes(), lay.faces());
    spmv(cm, x, curl);
    for (int m = 0; m < lay.nodes(); ++m) node[m] = d[m] * curl[m];
    if (kappa > 0.0) {
      spmv(p, curl, face);
      spmv(pt, face, curl);
      for (int m = 0; m < lay.nodes(); ++m) node[m] += kappa * curl[m];
    }
    spmv(cmt, node, y);
    for (int c = 0; c < nb; ++c) y[c] += x[c] / dt;
  };

  // Jacobi diagonal, including the column norms of P Cm.
  std::vector<double> diag(nb, 1.0 / dt);
  std::vector<std::pair<int, double>> col;
  for (int c = 0; c < nb; ++c) {
    col.clear();
    for (int k = cmt.ptr[c]; k < cmt.ptr[c + 1]; ++k) {
      const int m = cmt.col[k];
      diag[c] += d[m] * cmt.val[k] * cmt.val[k];
      if (kappa > 0.0)
        for (int q = pt.ptr[m]; q < pt.ptr[m + 1]; ++q) {
          const double v = pt.val[q] * cmt.val[k];
          auto it = std::find_if(col.begin(), col.end(), [&](const auto& e) { return e.first == pt.col[q]; });
          if (it == col.end())
            col.emplace_back(pt.col[q], v);
          else
            it->second += v;
        }
    }
    for (const auto& e : col) diag[c] += kappa * e.second * e.second;
  }
  const Preconditioner precond = [diag](std::span<const double> r, std::span<double> z) {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
  };

  // Affine part of the node curl from inhomogeneous tangential data.
  std::vector<double> cbd(lay.nodes(), 0.0);
  const MagneticRule& mr = problem_.magnetic_rule;
  if (!mr.bx.homogeneous() || !mr.by.homogeneous()) {
    VectorField zero = VectorField::cell(g);
    apply_boundary(zero, mr, t_new);
    cbd = curl_scalar(zero).interior();
  }

  const std::vector<double> v_old = pack_velocity(prev.v);
  const std::vector<double> b_old = pack_cells(prev.b);
  std::vector<double> node_rhs = spmv(pt, v_old);
  for (int m = 0; m < lay.nodes(); ++m) node_rhs[m] -= d[m] * cbd[m];
  if (kappa > 0.0) {
    const std::vector<double> pcb = spmv(p, cbd);
    const std::vector<double> back = spmv(pt, pcb);
    for (int m = 0; m < lay.nodes(); ++m) node_rhs[m] -= kappa * back[m];
  }
  std::vector<double> rhs = spmv(cmt, node_rhs);
  const std::vector<double> sx = sample_cells(g, problem_.sources.magnetic_x, t_new);
  const std::vector<double> sy = sample_cells(g, problem_.sources.magnetic_y, t_new);
  const int nc = lay.cells();
  for (int c = 0; c < nc; ++c) {
    rhs[c] += b_old[c] / dt + sx[c];
    rhs[nc + c] += b_old[nc + c] / dt + sy[c];
  }

  std::vector<double> x = b_old;
  MagneticResult res{VectorField::cell(g), prev.v, {}};
  res.report = solve(op, rhs, x, problem_.magnetic_solver, precond);
  require(res.report, "magnetic");
  unpack_cells(x, res.b);
  apply_boundary(res.b, mr, t_new);

  if (kappa > 0.0) {
    std::vector<double> curl = spmv(cm, x);
    for (int m = 0; m < lay.nodes(); ++m) curl[m] += cbd[m];
    const std::vector<double> force = spmv(p, curl);
    std::vector<double> vs = v_old;
    for (std::size_t f = 0; f < vs.size(); ++f) vs[f] -= kappa * force[f];
    unpack_velocity(vs, res.v_star);
  }
  apply_boundary(res.v_star, problem_.velocity_rule);
  return res;
}

Integrator::MomentumResult Integrator::momentum_step(const VectorField& v_star, const State& prev,
                                                     const Field& phi_new, const Field& w_new,
                                                     const VectorField& b_new) const {
  (void)b_new;
  const GridSpec& g = problem_.grid;
  const Layout& lay = ctx_.layout();
  const ModelParams& prm = problem_.params;
  const double dt = problem_.scheme.dt;
  const double t_new = prev.time + dt;
  const double rho0 = problem_.rho0;
  const int nf = lay.faces();

  CsrMatrix a = add(identity(nf, rho0 / dt), ctx_.advection_skew(prev.v), 1.0, rho0);
  a = add(a, ctx_.velocity_laplacian(), 1.0, -prm.nu);

  Field phi_old = prev.phi;
  apply_boundary(phi_old, problem_.phase_rule, prev.time);
  const std::vector<double> phi_f = pack_velocity(face_average(phi_old));
  const std::vector<double> grad_w = spmv(ctx_.grad(), w_new.interior());
  const std::vector<double> grad_p = spmv(ctx_.grad(), prev.p.interior());
  const std::vector<double> vs = pack_velocity(v_star);
  std::vector<double> rhs(nf);
  for (int f = 0; f < nf; ++f) rhs[f] = rho0 * vs[f] / dt - grad_p[f] - prm.lambda * phi_f[f] * grad_w[f];
  if (problem_.body_force) {
    VectorField force = VectorField::mac(g);
    problem_.body_force(t_new, phi_new, force);
    const std::vector<double> fv = pack_velocity(force);
    for (int f = 0; f < nf; ++f) rhs[f] += fv[f];
  }
  add_face_samples(lay, problem_.sources.momentum_x, problem_.sources.momentum_y, t_new, rhs);

  Preconditioner precond;
  if (u_basis_ && v_basis_) {
    const SpectralBasis* ub = u_basis_.get();
    const SpectralBasis* vb = v_basis_.get();
    const int nu = lay.ufaces(), nv = lay.vfaces();
    const double shift = rho0 / dt, visc = prm.nu;
    precond = [ub, vb, nu, nv, shift, visc](std::span<const double> r, std::span<double> z) {
      ub->solve_helmholtz(shift, visc, r.subspan(0, nu), z.subspan(0, nu));
      vb->solve_helmholtz(shift, visc, r.subspan(nu, nv), z.subspan(nu, nv));
    };
  } else {
    precond = jacobi(a);
  }

  std::vector<double> x = pack_velocity(prev.v);
  MomentumResult res{VectorField::mac(g), {}};
  res.report = solve(a, rhs, x, problem_.momentum_solver, precond);
  require(res.report, "momentum");
  unpack_velocity(x, res.v_tilde);
  apply_boundary(res.v_tilde, problem_.velocity_rule);
  return res;
}

Integrator::ProjectionResult Integrator::pressure_projection(const VectorField& v_tilde, const Field& p_prev) const {
  const GridSpec& g = problem_.grid;
  const double dt = problem_.scheme.dt;
  const double rho0 = problem_.rho0;
  const int n = static_cast<int>(g.cells());

  // Solve -L q = -D v_tilde with q = (dt/rho0) * pressure increment, so the
  // residual equals the divergence left in the projected velocity.
  const std::vector<double> vt = pack_velocity(v_tilde);
  std::vector<double> rhs = spmv(ctx_.div(), vt);
  for (double& r : rhs) r = -r;
  const CsrMatrix& lap = ctx_.pressure_laplacian();
  const LinearOperator op = [&lap](std::span<const double> x, std::span<double> y) {
    spmv(lap, x, y);
    for (double& v : y) v = -v;
  };
  const SpectralBasis* basis = pressure_basis_.get();
  const Preconditioner precond = [basis](std::span<const double> r, std::span<double> z) {
    basis->solve_helmholtz(0.0, 1.0, r, z);
  };
  std::vector<double> q(n, 0.0);
  ProjectionResult res{VectorField::mac(g), Field(g, Location::cell), {}, 0.0};
  res.report = solve(op, rhs, q, problem_.pressure_solver, precond);
  require(res.report, "pressure");

  const std::vector<double> gq = spmv(ctx_.grad(), q);
  std::vector<double> v = vt;
  for (std::size_t f = 0; f < v.size(); ++f) v[f] -= gq[f];
  unpack_velocity(v, res.v);
  apply_boundary(res.v, problem_.velocity_rule);

  std::vector<double> p = p_prev.interior();
  for (int c = 0; c < n; ++c) p[c] += rho0 / dt * q[c];
  const double pm = mean(p);
  for (double& x : p) x -= pm;
  res.p.set_interior(p);
  apply_boundary(res.p, BoundaryRule::neumann(), 0.0);
  res.div_inf = norm_inf(spmv(ctx_.div(), v));
  return res;
}

std::pair<State, StepBreakdown> Integrator::advance(const State& prev) const {
  const auto start = std::chrono::steady_clock::now();
  StepBreakdown bd;
  auto run = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const StepError&) {
      throw;
    } catch (const SolverError& e) {
      throw StepError(name, e);
    }
  };

  PhaseResult ph = run("phase", [&] { return ch_step(prev); });
  bd.ch = ph.report;
  MagneticResult mg = run("magnetic", [&] { return magnetic_step(prev, ph.phi); });
  bd.magnetic = mg.report;
  MomentumResult mo = run("momentum", [&] { return momentum_step(mg.v_star, prev, ph.phi, ph.w, mg.b); });
  bd.momentum = mo.report;
  ProjectionResult pj = run("pressure", [&] { return pressure_projection(mo.v_tilde, prev.p); });
  bd.pressure = pj.report;
  bd.div_inf = pj.div_inf;

  State next{std::move(ph.phi), std::move(ph.w), std::move(pj.v), std::move(mo.v_tilde), std::move(pj.p),
             std::move(mg.b), std::nullopt, prev.time + problem_.scheme.dt, prev.step + 1};
  if (ph.n_aux) next.n_aux.emplace(std::move(*ph.n_aux));
  bd.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(next), bd};
}

EnergyReport Integrator::energy(const State& s) const {
  const GridSpec& g = problem_.grid;
  const ModelParams& prm = problem_.params;
  const double da = g.cell_area();
  EnergyReport e;
  e.interfacial = 0.5 * prm.lambda * prm.eps * grad_norm2(s.phi, problem_.phase_rule);
  const std::vector<double> phi = s.phi.interior();
  double pot = 0.0;
  switch (problem_.scheme.scheme) {
    case Scheme::I: {
      const DoubleWell well{prm.eps, true};
      for (double f : phi) pot += well.F(f);
      pot *= prm.lambda;
      break;
    }
    case Scheme::II: {
      if (!s.n_aux) throw ConfigError("Scheme II energy needs the IEQ auxiliary");
      for (double n : s.n_aux->interior()) pot += n * n;
      pot *= prm.lambda;
      break;
    }
    case Scheme::III:
      for (double f : phi) pot += n_poly(f) * n_poly(f);
      pot *= prm.lambda / (4.0 * prm.eps);
      break;
  }
  e.potential = pot * da;
  double bb = 0.0;
  for (double v : pack_cells(s.b)) bb += v * v;
  e.magnetic = bb * da / (2.0 * prm.mu);
  double vv = 0.0;
  for (double v : pack_velocity(s.v)) vv += v * v;
  e.kinetic = 0.5 * problem_.rho0 * vv * da;
  double gp = 0.0;
  for (double v : spmv(ctx_.grad(), s.p.interior())) gp += v * v;
  const double dt = problem_.scheme.dt;
  e.pressure = dt * dt / (2.0 * problem_.rho0) * gp * da;
  return e;
}

double Integrator::mass(const State& s) const { return chmhd::mass(s); }

double Integrator::aux_drift(const State& s) const {
  if (problem_.scheme.scheme != Scheme::II || !s.n_aux) return 0.0;
  const Field exact = n_init(s.phi, problem_.scheme.C, DoubleWell{problem_.params.eps, false});
  double sum = 0.0;
  for (int j = 0; j < exact.nj(); ++j)
    for (int i = 0; i < exact.ni(); ++i) {
      const double d = (*s.n_aux)(i, j) - exact(i, j);
      sum += d * d;
    }
  return std::sqrt(sum * problem_.grid.cell_area());
}

double mass(const State& s) { return integrate(s.phi); }

}  // namespace chmhd
