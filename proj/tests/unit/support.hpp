#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "chmhd/grid.hpp"
#include "chmhd/operators.hpp"

namespace chmhd::test {

class Random {
 public:
  explicit Random(std::uint64_t seed = 12345) : gen_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

  std::vector<double> vector(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform();
    return v;
  }

  /// Interior and ghost values random.
  Field field(const GridSpec& g, Location loc) {
    Field f(g, loc);
    for (double& x : f.storage()) x = uniform();
    return f;
  }

  VectorField cell_vector(const GridSpec& g) {
    return {VectorKind::cell, field(g, Location::cell), field(g, Location::cell)};
  }

  /// Random MAC field with zero wall-normal faces.
  VectorField mac_walls(const GridSpec& g) {
    VectorField v = VectorField::mac(g);
    unpack_velocity(vector(Layout{g}.faces()), v);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

/// Fills interior and ghost samples from a closure.
template <class Fn>
void sample_all(Field& f, Fn&& fn) {
  for (int j = -1; j <= f.nj(); ++j)
    for (int i = -1; i <= f.ni(); ++i) f(i, j) = fn(f.x(i), f.y(j));
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (int j = 0; j < a.nj(); ++j)
    for (int i = 0; i < a.ni(); ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace chmhd::test
