#include "chmhd/potential.hpp"

#include <algorithm>
#include <cmath>

namespace chmhd {

std::vector<std::string> ModelParams::validate(const GridSpec& grid) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive and finite");
  };
  positive(nu, "nu");
  positive(mu, "mu");
  positive(lambda, "lambda");
  positive(sigma, "sigma");
  positive(mobility, "mobility");
  positive(eps, "eps");
  if (sigma_pair) {
    positive(sigma_pair->first, "sigma1");
    positive(sigma_pair->second, "sigma2");
  }
  std::vector<std::string> warnings;
  if (eps > 0.1 * std::min(grid.lx, grid.ly))
    warnings.push_back("eps is not small compared with the domain size");
  return warnings;
}

double ModelParams::sigma_at(double phi) const {
  if (!sigma_pair) return sigma;
  const auto [s1, s2] = *sigma_pair;
  const double s = s1 * 0.5 * (1.0 + phi) + s2 * 0.5 * (1.0 - phi);
  return std::clamp(s, std::min(s1, s2), std::max(s1, s2));
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::I: return "I";
    case Scheme::II: return "II";
    case Scheme::III: return "III";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "I" || s == "1") return Scheme::I;
  if (s == "II" || s == "2") return Scheme::II;
  if (s == "III" || s == "3") return Scheme::III;
  throw ConfigError("unknown scheme '" + s + "' (expected I, II or III)");
}

std::vector<std::string> SchemeConfig::validate(const ModelParams& params) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
  if (S < 0.0) throw ConfigError("S must be nonnegative");
  if (S_prime < 0.0) throw ConfigError("S_prime must be nonnegative");
  std::vector<std::string> warnings;
  if (scheme == Scheme::I && stabilizer(params) < 1.0 / params.eps)
    warnings.push_back("S = " + std::to_string(stabilizer(params)) +
                       " is below 1/eps; the energy law is not guaranteed");
  if (scheme == Scheme::II && !(C > 0.0)) throw ConfigError("Scheme II needs C > 0");
  return warnings;
}

double DoubleWell::F(double phi) const {
  if (extended) {
    if (phi <= -1.0) return (phi + 1.0) * (phi + 1.0) / eps;
    if (phi >= 1.0) return (phi - 1.0) * (phi - 1.0) / eps;
  }
  const double q = phi * phi - 1.0;
  return q * q / (4.0 * eps);
}

double DoubleWell::f(double phi) const {
  if (extended) {
    if (phi <= -1.0) return 2.0 * (phi + 1.0) / eps;
    if (phi >= 1.0) return 2.0 * (phi - 1.0) / eps;
  }
  return phi * (phi * phi - 1.0) / eps;
}

double DoubleWell::fprime(double phi) const {
  if (extended && (phi <= -1.0 || phi >= 1.0)) return 2.0 / eps;
  return (3.0 * phi * phi - 1.0) / eps;
}

double m_ieq(double phi, double C, const DoubleWell& well) {
  const double r = well.F(phi) + C;
  if (!(r > 0.0)) throw ConfigError("F(phi) + C must be positive for the IEQ auxiliary");
  return well.f(phi) / std::sqrt(r);
}

Field n_init(const Field& phi, double C, const DoubleWell& well) {
  Field n(phi.grid(), phi.location());
  for (int j = 0; j < phi.nj(); ++j)
    for (int i = 0; i < phi.ni(); ++i) {
      const double r = well.F(phi(i, j)) + C;
      if (!(r > 0.0)) throw ConfigError("F(phi) + C must be positive for the IEQ auxiliary");
      n(i, j) = std::sqrt(r);
    }
  return n;
}

}  // namespace chmhd
