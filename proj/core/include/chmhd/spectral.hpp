#pragma once

#include <memory>
#include <span>
#include <vector>

namespace chmhd {

/// Boundary treatment of one axis of a constant-coefficient 5-point Laplacian.
///   neumann_cell   : n cell unknowns, mirror ghosts
///   dirichlet_cell : n cell unknowns, antisymmetric ghosts
///   dirichlet_node : n-1 node unknowns between two clamped end nodes
///   periodic       : n unknowns, wrap-around
enum class SpectralAxis { neumann_cell, dirichlet_cell, dirichlet_node, periodic };

/// Real-to-real transform pair that diagonalises the 5-point Laplacian with
/// the given axis treatments. Mode k = ky*mx + kx; eigen()[k] is the
/// eigenvalue of -L (nonnegative).
class SpectralBasis {
 public:
  /// n is the cell count of the axis, h its spacing.
  SpectralBasis(int nx, double dx, SpectralAxis ax, int ny, double dy, SpectralAxis ay);
  ~SpectralBasis();
  SpectralBasis(const SpectralBasis&) = delete;
  SpectralBasis& operator=(const SpectralBasis&) = delete;

  int mx() const noexcept { return mx_; }
  int my() const noexcept { return my_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(mx_) * my_; }
  const std::vector<double>& eigen() const noexcept { return eigen_; }

  /// Unnormalised forward transform.
  void forward(std::span<const double> in, std::span<double> out) const;
  /// Inverse transform including the normalisation, so inverse(forward(x)) == x.
  void inverse(std::span<const double> in, std::span<double> out) const;

  /// out = (a + b*(-L))^{-1} in. Modes with a zero symbol are set to zero.
  void solve_helmholtz(double a, double b, std::span<const double> in, std::span<double> out) const;

 private:
  struct Plans;
  int mx_;
  int my_;
  double norm_;
  std::vector<double> eigen_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace chmhd
