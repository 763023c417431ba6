#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chmhd/mms.hpp"
#include "support.hpp"

namespace chmhd {
namespace {

using std::numbers::pi;

ModelParams params_of(double nu, double mu, double lambda, double sigma, double M, double eps) {
  ModelParams p;
  p.nu = nu;
  p.mu = mu;
  p.lambda = lambda;
  p.sigma = sigma;
  p.mobility = M;
  p.eps = eps;
  return p;
}

struct FrozenRow {
  double prm[7];  // nu, mu, lambda, sigma, M, eps, rho0
  double at[3];   // x, y, t
  double val[6];  // w, phase, mom_x, mom_y, mag_x, mag_y
};

const FrozenRow kFrozen[] = {
#include "mms_frozen.inc"
};

TEST(Mms, SourcesMatchIndependentSymbolicValues) {
  for (const FrozenRow& r : kFrozen) {
    const mms::ExactSolution ex(params_of(r.prm[0], r.prm[1], r.prm[2], r.prm[3], r.prm[4], r.prm[5]), r.prm[6]);
    const double x = r.at[0], y = r.at[1], t = r.at[2];
    const double got[6] = {ex.w(x, y, t),
                           ex.phase_source(x, y, t),
                           ex.momentum_source_x(x, y, t),
                           ex.momentum_source_y(x, y, t),
                           ex.magnetic_source_x(x, y, t),
                           ex.magnetic_source_y(x, y, t)};
    for (int k = 0; k < 6; ++k)
      EXPECT_NEAR(got[k], r.val[k], 1e-11 * std::max(1.0, std::abs(r.val[k]))) << "column " << k << " at t=" << t;
  }
}

TEST(Mms, ResidualOracleVanishes) {
  for (const ModelParams& p : {ModelParams{}, params_of(0.5, 2.0, 0.7, 3.0, 0.4, 0.3)}) {
    for (double rho0 : {1.0, 1.5}) {
      const mms::ExactSolution ex(p, rho0);
      for (double t : {0.3, 1.0}) {
        const mms::Residuals r = mms::residual_oracle(ex, 128, t);
        EXPECT_LE(r.max(), 1e-6) << "t=" << t << " phase " << r.phase << " mom " << r.momentum << " mag "
                                 << r.magnetic << " div_v " << r.div_v << " div_b " << r.div_b;
      }
    }
  }
}

TEST(Mms, ClosedFormValues) {
  const mms::ExactSolution ex;
  EXPECT_DOUBLE_EQ(ex.phi(0.5, 0.5, pi / 2), 1.0);
  EXPECT_EQ(ex.phi(0.3, 0.8, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(ex.p(1.0, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(ex.p(0.0, 1.0, 0.0), -1.0);
  EXPECT_NEAR(ex.b1(0.5, 0.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(ex.b2(0.0, 0.5, 0.0), -1.0, 1e-15);
  for (double s : {0.0, 0.3, 1.0}) {
    EXPECT_EQ(ex.u(0.0, s, 0.2), 0.0);
    EXPECT_EQ(ex.u(1.0, s, 0.2), 0.0);
    EXPECT_EQ(ex.v(s, 0.0, 0.2), 0.0);
    EXPECT_EQ(ex.v(s, 1.0, 0.2), 0.0);
  }
  // stream function consistency
  const double h = 1e-6, x = 0.37, y = 0.61, t = 0.4;
  EXPECT_NEAR((ex.psi(x, y + h, t) - ex.psi(x, y - h, t)) / (2 * h), ex.u(x, y, t), 1e-9);
  EXPECT_NEAR(-(ex.psi(x + h, y, t) - ex.psi(x - h, y, t)) / (2 * h), ex.v(x, y, t), 1e-9);
  EXPECT_EQ(ex.chem_source(x, y, t), 0.0);
}

TEST(Mms, SourceBundleCallsTheClosedForms) {
  const mms::ExactSolution ex(params_of(0.5, 2.0, 0.7, 3.0, 0.4, 0.3), 1.5);
  const Sources s = ex.sources();
  const double x = 0.21, y = 0.83, t = 0.7;
  EXPECT_EQ(s.phase(x, y, t), ex.phase_source(x, y, t));
  EXPECT_EQ(s.momentum_x(x, y, t), ex.momentum_source_x(x, y, t));
  EXPECT_EQ(s.momentum_y(x, y, t), ex.momentum_source_y(x, y, t));
  EXPECT_EQ(s.magnetic_x(x, y, t), ex.magnetic_source_x(x, y, t));
  EXPECT_EQ(s.magnetic_y(x, y, t), ex.magnetic_source_y(x, y, t));
  EXPECT_FALSE(static_cast<bool>(s.chem));
}

TEST(Mms, SamplingAtNativeLocations) {
  const mms::ExactSolution ex;
  const GridSpec g(16, 16);
  const double t = 0.6;
  const Field phi = std::get<Field>(mms::exact_at(ex, g, t, mms::FieldId::phi));
  EXPECT_EQ(phi.location(), Location::cell);
  EXPECT_EQ(phi(3, 5), ex.phi(3.5 / 16, 5.5 / 16, t));
  const VectorField v = std::get<VectorField>(mms::exact_at(ex, g, t, mms::FieldId::v));
  EXPECT_EQ(v.kind, VectorKind::mac);
  EXPECT_EQ(v.x(4, 2), ex.u(4.0 / 16, 2.5 / 16, t));
  EXPECT_EQ(v.y(4, 2), ex.v(4.5 / 16, 2.0 / 16, t));
  for (int j = 0; j < 16; ++j) EXPECT_EQ(v.x(0, j), 0.0);
  const VectorField b = std::get<VectorField>(mms::exact_at(ex, g, t, mms::FieldId::b));
  EXPECT_EQ(b.kind, VectorKind::cell);
  EXPECT_EQ(b.y(7, 1), ex.b2(7.5 / 16, 1.5 / 16, t));
  const Field p = std::get<Field>(mms::exact_at(ex, g, t, mms::FieldId::p));
  EXPECT_NEAR(integrate(p), 0.0, 1e-14);
  EXPECT_THROW(mms::exact_at(ex, g, -0.1, mms::FieldId::w), ConfigError);
}

TEST(Mms, RestrictionIsConsistentAcrossLevels) {
  // the cell average of four fine samples approaches the coarse sample at second order
  const mms::ExactSolution ex;
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const Field c = std::get<Field>(mms::exact_at(ex, GridSpec(n, n), 0.5, mms::FieldId::phi));
    const Field f = std::get<Field>(mms::exact_at(ex, GridSpec(2 * n, 2 * n), 0.5, mms::FieldId::phi));
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double avg = 0.25 * (f(2 * i, 2 * j) + f(2 * i + 1, 2 * j) + f(2 * i, 2 * j + 1) + f(2 * i + 1, 2 * j + 1));
        worst = std::max(worst, std::abs(avg - c(i, j)));
      }
    if (prev > 0.0) {
      EXPECT_NEAR(std::log2(prev / worst), 2.0, 0.2);
    }
    prev = worst;
  }
}

TEST(Mms, BoundaryData) {
  const mms::ExactSolution ex(params_of(0.5, 2.0, 0.7, 3.0, 0.4, 0.3));
  const mms::BoundarySet bs = mms::boundary_data(ex);
  for (double s : {0.1, 0.5, 0.77})
    for (double t : {0.0, 0.4}) {
      for (Side side : {Side::left, Side::right, Side::bottom, Side::top})
        EXPECT_NEAR(bs.chem[side].value(s, t), 0.0, 1e-12);
      EXPECT_NEAR(bs.magnetic.by[Side::left].value(s, t), -std::sin(pi * s) * std::cos(t), 1e-15);
      EXPECT_NEAR(bs.magnetic.by[Side::right].value(s, t), std::sin(pi * s) * std::cos(t), 1e-15);
      EXPECT_NEAR(bs.magnetic.bx[Side::bottom].value(s, t), std::sin(pi * s) * std::cos(t), 1e-15);
    }
  EXPECT_EQ(bs.magnetic.by[Side::left].kind, SideRule::Kind::dirichlet);
  EXPECT_EQ(bs.magnetic.bx[Side::left].kind, SideRule::Kind::neumann);
  EXPECT_EQ(bs.phase[Side::top].kind, SideRule::Kind::neumann);
  EXPECT_EQ(bs.velocity[Side::left], Wall::no_slip);
}

TEST(Mms, InitialStateIsDiscretelySolenoidal) {
  const mms::ExactSolution ex;
  SchemeConfig sc;
  sc.dt = 1e-3;
  const Integrator integ(mms::make_problem(ex, 16, sc));
  const State st = mms::initial_state(integ, ex, 0.2);
  EXPECT_LE(max_abs(div_from_faces(st.v)), 1e-12);
  EXPECT_DOUBLE_EQ(st.time, 0.2);
  EXPECT_NEAR(st.phi(8, 8), ex.phi(8.5 / 16, 8.5 / 16, 0.2), 1e-15);
}

TEST(Mms, ErrorsDecreaseUnderRefinement) {
  const mms::ExactSolution ex(params_of(1.0, 1.0, 1.0, 1.0, 1.0, 0.5));
  double prev = 0.0;
  for (int n : {8, 16}) {
    SchemeConfig sc;
    sc.dt = 1.0 / (n * n);
    const Integrator integ(mms::make_problem(ex, n, sc));
    State st = mms::initial_state(integ, ex);
    for (int k = 0; k < n * n / 8; ++k) st = integ.advance(st).first;
    Field exact(integ.problem().grid, Location::cell);
    exact.sample([&](double x, double y) { return ex.phi(x, y, st.time); });
    const double err = test::max_abs_diff(exact, st.phi);
    EXPECT_TRUE(std::isfinite(err));
    if (prev > 0.0) {
      EXPECT_LT(err, 0.5 * prev);
    }
    prev = err;
  }
}

}  // namespace
}  // namespace chmhd
