#include <gtest/gtest.h>

#include <cmath>

#include "chmhd/potential.hpp"
#include "support.hpp"

namespace chmhd {
namespace {

TEST(DoubleWell, RootsAndBarrier) {
  for (double eps : {1.0, 0.01, 0.25}) {
    const DoubleWell w{eps};
    EXPECT_EQ(w.F(1.0), 0.0);
    EXPECT_EQ(w.F(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(w.F(0.0), 1.0 / (4.0 * eps));
    EXPECT_DOUBLE_EQ(w.F(2.0), 1.0 / eps);
    EXPECT_DOUBLE_EQ(w.F(-3.0), 4.0 / eps);
  }
}

TEST(DoubleWell, SeamsAreSmooth) {
  const DoubleWell w{0.3};
  const double d = 1e-9;
  for (double s : {-1.0, 1.0}) {
    EXPECT_NEAR(w.F(s - d), w.F(s + d), 1e-12);
    EXPECT_NEAR(w.f(s - d), w.f(s + d), 1e-7);
    EXPECT_NEAR(w.f(s), 0.0, 1e-15);
    // one-sided difference quotients of F agree at the seam
    const double left = (w.F(s) - w.F(s - 1e-6)) / 1e-6;
    const double right = (w.F(s + 1e-6) - w.F(s)) / 1e-6;
    EXPECT_NEAR(left, 0.0, 1e-4);
    EXPECT_NEAR(right, 0.0, 1e-4);
  }
}

TEST(DoubleWell, DerivativeValues) {
  for (double eps : {1.0, 0.01}) {
    const DoubleWell w{eps};
    EXPECT_EQ(w.f(0.0), 0.0);
    EXPECT_EQ(w.f(1.0), 0.0);
    EXPECT_EQ(w.f(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(w.f(0.5), -0.375 / eps);
  }
}

TEST(DoubleWell, DerivativeMatchesFiniteDifferences) {
  const double h = 1e-4;
  for (double eps : {1.0, 0.01}) {
    const DoubleWell w{eps};
    for (double phi : {-2.0, -0.3, 0.9, 1.7}) {
      const double fd = (w.F(phi + h) - w.F(phi - h)) / (2 * h);
      EXPECT_LE(std::abs(fd - w.f(phi)), h * h * 6.0 / eps) << phi;
      const double fd2 = (w.f(phi + h) - w.f(phi - h)) / (2 * h);
      EXPECT_LE(std::abs(fd2 - w.fprime(phi)), h * h * 6.0 / eps) << phi;
    }
  }
}

TEST(DoubleWell, NonnegativeAndLipschitz) {
  test::Random rng(50);
  const double eps = 0.05;
  const DoubleWell w{eps};
  for (int k = 0; k < 10000; ++k) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    EXPECT_GE(w.F(a), 0.0);
    EXPECT_LE(std::abs(w.f(a) - w.f(b)), (2.0 / eps) * std::abs(a - b) * (1 + 1e-12) + 1e-12);
    EXPECT_LE(std::abs(w.fprime(a)), 2.0 / eps + 1e-12);
  }
}

TEST(DoubleWell, UnextendedIsTheQuartic) {
  const DoubleWell w{0.5, false};
  EXPECT_DOUBLE_EQ(w.F(2.0), 9.0 / 2.0);
  EXPECT_DOUBLE_EQ(w.f(2.0), 2.0 * 3.0 / 0.5);
}

TEST(Ieq, AuxiliaryRatio) {
  const DoubleWell w{1.0};
  EXPECT_EQ(m_ieq(0.0, 1.0, w), 0.0);
  EXPECT_EQ(m_ieq(0.0, 5.0, w), 0.0);
  EXPECT_EQ(m_ieq(1.0, 1.0, w), 0.0);
  EXPECT_NEAR(m_ieq(0.5, 1.0, w), -0.375 / std::sqrt(1.140625), 1e-15);
  EXPECT_NEAR(m_ieq(0.5, 1.0, w), -0.35112, 1e-5);
  EXPECT_THROW(m_ieq(1.0, 0.0, w), ConfigError);
  EXPECT_THROW(m_ieq(0.0, -1.0, w), ConfigError);
}

TEST(Ieq, InitialAuxiliary) {
  const GridSpec g(8, 8);
  EXPECT_EQ(max_abs(n_init(Field(g, Location::cell, 1.0), 1.0, DoubleWell{0.01})), 1.0);
  const Field n0 = n_init(Field(g, Location::cell, 0.0), 0.0, DoubleWell{0.25});
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(n0(i, j), 1.0);

  test::Random rng(51);
  const DoubleWell w{0.1, false};
  const Field phi = rng.field(g, Location::cell);
  const Field n = n_init(phi, 1.0, w);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(n(i, j) * n(i, j) - w.F(phi(i, j)) - 1.0, 0.0, 1e-13);
  EXPECT_THROW(n_init(Field(g, Location::cell, 1.0), 0.0, w), ConfigError);
}

TEST(Ieq, QuadraticFormOfThePolynomialAuxiliary) {
  EXPECT_EQ(n_poly(1.0), 0.0);
  EXPECT_EQ(n_poly(-1.0), 0.0);
  EXPECT_EQ(n_poly(0.0), -1.0);
  const GridSpec g(16, 16);
  test::Random rng(52);
  const double eps = 0.2, lambda = 3.0;
  const DoubleWell w{eps};
  const Field phi = rng.field(g, Location::cell);
  Field np(g, Location::cell), F(g, Location::cell);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) {
      np(i, j) = n_poly(phi(i, j));
      F(i, j) = w.F(phi(i, j));
    }
  EXPECT_NEAR(lambda / (4 * eps) * inner(np, np), lambda * integrate(F), 1e-13);
}

TEST(ModelParams, ValidationAndConductivityBlend) {
  const GridSpec g(8, 8);
  ModelParams p;
  EXPECT_TRUE(p.validate(g).size() == 1);  // eps = 1 is not small on the unit square
  p.eps = 0.01;
  EXPECT_TRUE(p.validate(g).empty());
  p.nu = 0.0;
  EXPECT_THROW(p.validate(g), ConfigError);
  p.nu = 1.0;
  p.sigma_pair = std::pair{300.0, 400.0};
  EXPECT_DOUBLE_EQ(p.sigma_at(1.0), 300.0);
  EXPECT_DOUBLE_EQ(p.sigma_at(-1.0), 400.0);
  EXPECT_DOUBLE_EQ(p.sigma_at(0.0), 350.0);
  EXPECT_DOUBLE_EQ(p.sigma_at(1.5), 300.0);
  EXPECT_DOUBLE_EQ(p.sigma_at(-2.0), 400.0);
  p.sigma_pair = std::pair{-1.0, 2.0};
  EXPECT_THROW(p.validate(g), ConfigError);
}

TEST(SchemeConfig, ValidationAndStabiliser) {
  ModelParams p;
  p.eps = 0.01;
  SchemeConfig s;
  EXPECT_DOUBLE_EQ(s.stabilizer(p), 100.0);
  EXPECT_TRUE(s.validate(p).empty());
  s.S = 1.0;
  EXPECT_EQ(s.validate(p).size(), 1u);
  s.scheme = Scheme::II;
  s.C = 0.0;
  EXPECT_THROW(s.validate(p), ConfigError);
  s.C = 1.0;
  s.dt = -1.0;
  EXPECT_THROW(s.validate(p), ConfigError);
  EXPECT_EQ(parse_scheme("III"), Scheme::III);
  EXPECT_EQ(parse_scheme("2"), Scheme::II);
  EXPECT_THROW(parse_scheme("IV"), ConfigError);
  EXPECT_STREQ(to_string(Scheme::II), "II");
}

}  // namespace
}  // namespace chmhd
