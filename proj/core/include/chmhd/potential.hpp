#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chmhd/grid.hpp"

namespace chmhd {

struct ModelParams {
  double nu = 1.0;      ///< kinematic viscosity
  double mu = 1.0;      ///< magnetic permeability
  double lambda = 1.0;  ///< capillary coefficient
  double sigma = 1.0;   ///< electric conductivity of a single-conductivity run
  /// Conductivities (sigma1 in the phi = +1 fluid, sigma2 in the phi = -1 fluid).
  std::optional<std::pair<double, double>> sigma_pair;
  double mobility = 1.0;
  double eps = 1.0;  ///< interface thickness

  /// Throws ConfigError on nonpositive values; returns advisory warnings.
  std::vector<std::string> validate(const GridSpec& grid) const;

  /// Conductivity at phase value phi; the two-fluid blend is linear in phi
  /// and clamped to [min, max] of the pair.
  double sigma_at(double phi) const;
};

enum class Scheme { I, II, III };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SchemeConfig {
  Scheme scheme = Scheme::I;
  double S = 0.0;        ///< Scheme I stabiliser; 0 selects 1/eps
  double S_prime = 0.0;  ///< Scheme III stabiliser
  double C = 1.0;        ///< Scheme II shift
  double dt = 1e-3;
  double T = 1.0;

  /// Throws ConfigError on invalid values; returns advisory warnings.
  std::vector<std::string> validate(const ModelParams& params) const;
  double stabilizer(const ModelParams& params) const { return S > 0.0 ? S : 1.0 / params.eps; }
};

/// Ginzburg-Landau double well (1/4eps)(phi^2-1)^2. When `extended`, the
/// well is continued by quadratics outside [-1, 1] so that |F''| <= 2/eps.
struct DoubleWell {
  double eps = 1.0;
  bool extended = true;

  double F(double phi) const;
  double f(double phi) const;
  double fprime(double phi) const;
};

/// f(phi) / sqrt(F(phi) + C)
double m_ieq(double phi, double C, const DoubleWell& well);

/// Pointwise sqrt(F(phi) + C) on a cell field.
Field n_init(const Field& phi, double C, const DoubleWell& well);

/// phi^2 - 1
inline double n_poly(double phi) { return phi * phi - 1.0; }

}  // namespace chmhd
