#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chmhd/grid.hpp"
#include "support.hpp"

namespace chmhd {
namespace {

using std::numbers::pi;

TEST(GridSpec, RejectsTooFewCellsAndBadExtents) {
  EXPECT_THROW(GridSpec(3, 8), ConfigError);
  EXPECT_THROW(GridSpec(8, 2), ConfigError);
  EXPECT_THROW(GridSpec(8, 8, 0.0, 1.0), ConfigError);
  EXPECT_THROW(GridSpec(8, 8, 1.0, -1.0), ConfigError);
  const GridSpec g(100, 150, 1.0, 1.5);
  EXPECT_DOUBLE_EQ(g.dx(), 0.01);
  EXPECT_DOUBLE_EQ(g.dy(), 0.01);
}

TEST(Field, ShapesFollowStaggering) {
  const GridSpec g(6, 5);
  EXPECT_EQ(Field(g, Location::cell).ni(), 6);
  EXPECT_EQ(Field(g, Location::node).nj(), 6);
  const VectorField v = VectorField::mac(g);
  EXPECT_EQ(v.x.ni(), 7);
  EXPECT_EQ(v.x.nj(), 5);
  EXPECT_EQ(v.y.ni(), 6);
  EXPECT_EQ(v.y.nj(), 6);
  const VectorField b = VectorField::cell(g);
  EXPECT_EQ(b.x.ni(), 6);
  EXPECT_EQ(b.y.nj(), 5);
}

TEST(ApplyBoundary, ConstantNeumannGhostsCopy) {
  const GridSpec g(8, 8);
  Field f(g, Location::cell, 3.0);
  for (double& v : f.storage()) v = 3.0;
  f(-1, 2) = 99.0;
  apply_boundary(f, BoundaryRule::neumann(), 0.0);
  for (int k = 0; k < 8; ++k) {
    EXPECT_EQ(f(-1, k), 3.0);
    EXPECT_EQ(f(8, k), 3.0);
    EXPECT_EQ(f(k, -1), 3.0);
    EXPECT_EQ(f(k, 8), 3.0);
  }
}

TEST(ApplyBoundary, HomogeneousDirichletReflectsSign) {
  const GridSpec g(8, 8);
  Field f(g, Location::cell);
  f(0, 3) = 1.0;
  apply_boundary(f, BoundaryRule::dirichlet(), 0.0);
  EXPECT_EQ(f(-1, 3), -1.0);
}

TEST(ApplyBoundary, MagneticTangentialDatumOnLeftWall) {
  const GridSpec g(32, 32);
  const double t = 0.7;
  auto b1 = [t](double x, double y) { return std::sin(pi * x) * std::cos(pi * y) * std::cos(t); };
  auto b2 = [t](double x, double y) { return -std::sin(pi * y) * std::cos(pi * x) * std::cos(t); };
  VectorField b = VectorField::cell(g);
  b.x.sample(b1);
  b.y.sample(b2);
  SideData tangential;
  tangential.left = [](double s, double tt) { return -std::sin(pi * s) * std::cos(tt); };
  apply_boundary(b, MagneticRule::tangential(tangential), t);
  for (int j = 0; j < g.ny; ++j) {
    const double wall = 0.5 * (b.y(-1, j) + b.y(0, j));
    EXPECT_NEAR(wall, b2(0.0, b.y.y(j)), 1e-12);
    // the normal component is mirrored
    EXPECT_EQ(b.x(-1, j), b.x(0, j));
  }
}

TEST(ApplyBoundary, PeriodicOnOneSideIsAConfigError) {
  const GridSpec g(8, 8);
  Field f(g, Location::cell);
  BoundaryRule r = BoundaryRule::neumann();
  r[Side::left] = SideRule::periodic();
  EXPECT_THROW(apply_boundary(f, r, 0.0), ConfigError);
  r = BoundaryRule::periodic();
  r[Side::top] = SideRule::neumann();
  EXPECT_THROW(apply_boundary(f, r, 0.0), ConfigError);
}

TEST(ApplyBoundary, RejectsFaceFieldsForScalarRules) {
  const GridSpec g(8, 8);
  Field f(g, Location::xface);
  EXPECT_THROW(apply_boundary(f, BoundaryRule::neumann(), 0.0), ConfigError);
}

TEST(ApplyBoundary, PeriodicGhostsAreBitwiseCopies) {
  const GridSpec g(9, 7);
  test::Random rng(1);
  Field f = rng.field(g, Location::cell);
  apply_boundary(f, BoundaryRule::periodic(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    EXPECT_EQ(f(-1, j), f(g.nx - 1, j));
    EXPECT_EQ(f(g.nx, j), f(0, j));
  }
  for (int i = -1; i <= g.nx; ++i) {
    EXPECT_EQ(f(i, -1), f(i, g.ny - 1));
    EXPECT_EQ(f(i, g.ny), f(i, 0));
  }
}

TEST(ApplyBoundary, IdempotentForEveryRule) {
  const GridSpec g(10, 12);
  test::Random rng(2);
  BoundaryRule data_rule = BoundaryRule::neumann();
  data_rule[Side::left] = SideRule::dirichlet([](double s, double t) { return s * s + t; });
  data_rule[Side::top] = SideRule::neumann([](double s, double t) { return std::cos(s) * t; });
  for (const BoundaryRule& rule : {BoundaryRule::neumann(), BoundaryRule::dirichlet(), BoundaryRule::periodic(),
                                   data_rule}) {
    for (Location loc : {Location::cell, Location::node}) {
      Field f = rng.field(g, loc);
      apply_boundary(f, rule, 0.3);
      const std::vector<double> once(f.storage().begin(), f.storage().end());
      apply_boundary(f, rule, 0.3);
      EXPECT_TRUE(std::equal(once.begin(), once.end(), f.storage().begin())) << to_string(loc);
    }
  }

  VectorField b = rng.cell_vector(g);
  SideData tang;
  tang.bottom = [](double s, double) { return s; };
  const MagneticRule mr = MagneticRule::tangential(tang);
  apply_boundary(b, mr, 0.0);
  const std::vector<double> bx(b.x.storage().begin(), b.x.storage().end());
  apply_boundary(b, mr, 0.0);
  EXPECT_TRUE(std::equal(bx.begin(), bx.end(), b.x.storage().begin()));

  VectorField v = rng.mac_walls(g);
  VelocityRule vr;
  vr.walls = {Wall::free_slip, Wall::free_slip, Wall::no_slip, Wall::no_slip};
  apply_boundary(v, vr);
  const std::vector<double> vy(v.y.storage().begin(), v.y.storage().end());
  apply_boundary(v, vr);
  EXPECT_TRUE(std::equal(vy.begin(), vy.end(), v.y.storage().begin()));
}

TEST(ApplyBoundary, VelocityWallsZeroNormalAndReflectTangential) {
  const GridSpec g(8, 8);
  test::Random rng(3);
  VectorField v = VectorField::mac(g);
  for (double& x : v.x.storage()) x = rng.uniform();
  for (double& x : v.y.storage()) x = rng.uniform();
  VelocityRule vr;
  vr.walls = {Wall::free_slip, Wall::free_slip, Wall::no_slip, Wall::no_slip};
  apply_boundary(v, vr);
  for (int j = 0; j < g.ny; ++j) {
    EXPECT_EQ(v.x(0, j), 0.0);
    EXPECT_EQ(v.x(g.nx, j), 0.0);
    EXPECT_EQ(v.y(-1, j), v.y(0, j));  // free slip
  }
  for (int i = 0; i < g.nx; ++i) {
    EXPECT_EQ(v.y(i, 0), 0.0);
    EXPECT_EQ(v.x(i, -1), -v.x(i, 0));  // no slip
  }
}

TEST(Integrate, ConstantIsArea) {
  for (int n : {4, 8, 16, 64}) EXPECT_EQ(integrate(Field(GridSpec(n, n), Location::cell, 1.0)), 1.0);
  EXPECT_NEAR(integrate(Field(GridSpec(10, 30), Location::cell, 1.0)), 1.0, 1e-14);
  EXPECT_NEAR(integrate(Field(GridSpec(100, 150, 1.0, 1.5), Location::cell, 1.0)), 1.5, 1e-13);
}

TEST(Integrate, MidpointExactOnLinears) {
  Field f(GridSpec(8, 8), Location::cell);
  f.sample([](double x, double) { return x; });
  EXPECT_EQ(integrate(f), 0.5);
}

TEST(Integrate, SmoothFieldIsSecondOrder) {
  Field f(GridSpec(64, 64), Location::cell);
  f.sample([](double x, double y) { return std::pow(std::sin(pi * x) * std::sin(pi * y), 2); });
  EXPECT_NEAR(integrate(f), 0.25, 1e-4);
}

TEST(Integrate, Linear) {
  const GridSpec g(12, 9);
  test::Random rng(4);
  const Field a = rng.field(g, Location::cell);
  const Field b = rng.field(g, Location::cell);
  Field c(g, Location::cell);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) c(i, j) = 2.5 * a(i, j) - 0.75 * b(i, j);
  EXPECT_NEAR(integrate(c), 2.5 * integrate(a) - 0.75 * integrate(b), 1e-14);
  EXPECT_THROW(integrate(Field(g, Location::node)), ConfigError);
}

TEST(Inner, TrapezoidWeightsIntegrateConstantsExactly) {
  const GridSpec g(8, 16, 2.0, 1.0);
  for (Location loc : {Location::cell, Location::node, Location::xface, Location::yface}) {
    const Field one(g, loc, 1.0);
    EXPECT_NEAR(inner(one, one), 2.0, 1e-14) << to_string(loc);
  }
  EXPECT_THROW(inner(Field(g, Location::cell), Field(g, Location::node)), std::invalid_argument);
}

}  // namespace
}  // namespace chmhd
