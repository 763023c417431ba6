#pragma once

#include <variant>

#include "chmhd/grid.hpp"
#include "chmhd/potential.hpp"
#include "chmhd/schemes.hpp"

namespace chmhd::mms {

/// Manufactured solution on the unit square:
///   phi = sin^2(pi x) sin^2(pi y) sin t
///   v   = (g(x) g'(y), -g'(x) g(y)) cos t / 2,  g(s) = s^2 (s-1)^2
///   p   = (2x-1)(2y-1) cos t
///   b   = (sin pi x cos pi y, -cos pi x sin pi y) cos t
/// with w = -eps lap(phi) + f(phi) for the unextended double well.
/// Sources are the residuals of the model equations for general
/// parameters and background density rho0.
class ExactSolution {
 public:
  explicit ExactSolution(ModelParams params = {}, double rho0 = 1.0);

  const ModelParams& params() const noexcept { return params_; }
  double rho0() const noexcept { return rho0_; }

  double phi(double x, double y, double t) const;
  double w(double x, double y, double t) const;
  double w_x(double x, double y, double t) const;
  double w_y(double x, double y, double t) const;
  double u(double x, double y, double t) const;
  double v(double x, double y, double t) const;
  double p(double x, double y, double t) const;
  double b1(double x, double y, double t) const;
  double b2(double x, double y, double t) const;
  /// Stream function with (u, v) = (dpsi/dy, -dpsi/dx).
  double psi(double x, double y, double t) const;

  double phase_source(double x, double y, double t) const;
  /// Zero: w is defined by its own equation.
  double chem_source(double x, double y, double t) const;
  double momentum_source_x(double x, double y, double t) const;
  double momentum_source_y(double x, double y, double t) const;
  double magnetic_source_x(double x, double y, double t) const;
  double magnetic_source_y(double x, double y, double t) const;

  Sources sources() const;

 private:
  struct Phase {
    double phi, phi_x, phi_y, lap, w_x, w_y, lap_w;
  };
  Phase phase(double x, double y, double t) const;

  ModelParams params_;
  double rho0_;
};

enum class FieldId { phi, w, v, p, b };

using Sampled = std::variant<Field, VectorField>;

/// Exact field sampled at its native staggering. v lands on interior and
/// wall faces, b at cell centres. Ghosts are left at zero.
Sampled exact_at(const ExactSolution& ex, const GridSpec& grid, double t, FieldId which);

struct BoundarySet {
  BoundaryRule phase;
  /// Outward flux closures of the exact w (identically zero).
  BoundaryRule chem;
  VelocityRule velocity;
  MagneticRule magnetic;
  BoundaryRule pressure;
};

BoundarySet boundary_data(const ExactSolution& ex);

/// Integrator problem for the manufactured solution on [0,1]^2.
Problem make_problem(const ExactSolution& ex, int n, const SchemeConfig& scheme);

/// Initial state: exact phi, p and b; v is the discrete curl of the exact
/// stream function so that it starts discretely divergence-free.
State initial_state(const Integrator& integ, const ExactSolution& ex, double t0 = 0.0);

struct Residuals {
  double phase = 0.0;
  double chem = 0.0;
  double momentum = 0.0;
  double magnetic = 0.0;
  double div_v = 0.0;
  double div_b = 0.0;

  double max() const noexcept;
};

/// Max over an n x n grid of cell centres of (PDE applied to the exact
/// closures by eighth-order central differences) minus the hardcoded source.
Residuals residual_oracle(const ExactSolution& ex, int n, double t);

}  // namespace chmhd::mms
