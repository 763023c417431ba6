#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chmhd/grid.hpp"
#include "chmhd/linalg.hpp"
#include "chmhd/operators.hpp"
#include "chmhd/potential.hpp"

namespace chmhd {

class SpectralBasis;

using PointFn = std::function<double(double x, double y, double t)>;

/// Additive right-hand sides evaluated at the new time level. Empty members
/// contribute nothing. Momentum sources are sampled on faces, the rest at
/// cell centres.
struct Sources {
  PointFn phase;
  PointFn chem;
  PointFn magnetic_x;
  PointFn magnetic_y;
  PointFn momentum_x;
  PointFn momentum_y;
};

/// Adds a force to the interior faces of `force`, given the new phase field.
using BodyForce = std::function<void(double t, const Field& phi_new, VectorField& force)>;

struct Problem {
  GridSpec grid;
  ModelParams params;
  SchemeConfig scheme;
  BoundaryRule phase_rule = BoundaryRule::neumann();
  VelocityRule velocity_rule;
  MagneticRule magnetic_rule = MagneticRule::tangential();
  /// Background density multiplying inertia.
  double rho0 = 1.0;
  /// When false the Lorentz force is dropped from the momentum balance.
  bool lorentz = true;
  Sources sources;
  BodyForce body_force;

  SolverConfig phase_solver{};
  SolverConfig magnetic_solver{.method = Method::cg};
  SolverConfig momentum_solver{};
  SolverConfig pressure_solver{.method = Method::cg, .nullspace = Nullspace::constants};
};

struct State {
  Field phi;
  Field w;
  VectorField v;
  VectorField v_tilde;
  Field p;
  VectorField b;
  /// IEQ auxiliary, present for Scheme II only.
  std::optional<Field> n_aux;
  double time = 0.0;
  long step = 0;

  static State zeros(const GridSpec& grid, bool with_aux);
};

struct StepBreakdown {
  SolveReport ch;
  SolveReport magnetic;
  SolveReport momentum;
  SolveReport pressure;
  double div_inf = 0.0;
  double wall_seconds = 0.0;
};

struct EnergyReport {
  double interfacial = 0.0;
  double potential = 0.0;
  double magnetic = 0.0;
  double kinetic = 0.0;
  double pressure = 0.0;

  double total() const noexcept { return interfacial + potential + magnetic + kinetic + pressure; }
};

/// Failure of one substep; carries the solver report of that substep.
class StepError : public SolverError {
 public:
  StepError(const std::string& substep, const SolverError& cause)
      : SolverError(substep + ": " + cause.what(), cause.report()), substep_(substep) {}
  const std::string& substep() const noexcept { return substep_; }

 private:
  std::string substep_;
};

class Integrator {
 public:
  explicit Integrator(Problem problem);
  ~Integrator();
  Integrator(const Integrator&) = delete;
  Integrator& operator=(const Integrator&) = delete;

  const Problem& problem() const noexcept { return problem_; }
  const StencilContext& stencils() const noexcept { return ctx_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Builds a boundary-consistent State from initial data. w is set to the
  /// equilibrium chemical potential and, for Scheme II, N = sqrt(F + C).
  State initial_state(const Field& phi0, const VectorField& v0, const Field& p0, const VectorField& b0,
                      double t0 = 0.0) const;

  struct PhaseResult {
    Field phi;
    Field w;
    std::optional<Field> n_aux;
    SolveReport report;
  };
  struct MagneticResult {
    VectorField b;
    VectorField v_star;
    SolveReport report;
  };
  struct MomentumResult {
    VectorField v_tilde;
    SolveReport report;
  };
  struct ProjectionResult {
    VectorField v;
    Field p;
    SolveReport report;
    double div_inf = 0.0;
  };

  PhaseResult ch_step(const State& prev) const;
  PhaseResult ch_step_scheme_I(const State& prev) const;
  PhaseResult ch_step_scheme_II(const State& prev) const;
  PhaseResult ch_step_scheme_III(const State& prev) const;
  /// phi_new sets the conductivity of two-fluid runs.
  MagneticResult magnetic_step(const State& prev, const Field& phi_new) const;
  MomentumResult momentum_step(const VectorField& v_star, const State& prev, const Field& phi_new,
                               const Field& w_new, const VectorField& b_new) const;
  ProjectionResult pressure_projection(const VectorField& v_tilde, const Field& p_prev) const;

  std::pair<State, StepBreakdown> advance(const State& prev) const;

  EnergyReport energy(const State& s) const;
  double mass(const State& s) const;

  /// Scheme II drift ||N - sqrt(F(phi) + C)||, zero for the other schemes.
  double aux_drift(const State& s) const;

 private:
  PhaseResult phase_solve(const State& prev, const std::vector<double>& pcoef, const std::vector<double>& q) const;

  Problem problem_;
  StencilContext ctx_;
  std::vector<std::string> warnings_;
  std::unique_ptr<SpectralBasis> phase_basis_;
  std::unique_ptr<SpectralBasis> u_basis_;
  std::unique_ptr<SpectralBasis> v_basis_;
  std::unique_ptr<SpectralBasis> pressure_basis_;
};

/// Mass of the phase field.
double mass(const State& s);

}  // namespace chmhd
