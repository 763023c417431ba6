#include "chmhd/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace chmhd {

namespace {

double sum_sq(const std::vector<double>& e) {
  double s = 0.0;
  for (double v : e) s += v * v;
  return s;
}

// Squared neighbour differences of a grid of values, i fastest, scaled by
// the spacing of each direction.
double diff_sq(const std::vector<double>& e, int ni, int nj, double hx, double hy) {
  double s = 0.0;
  for (int j = 0; j < nj; ++j)
    for (int i = 0; i + 1 < ni; ++i) {
      const double d = (e[j * ni + i + 1] - e[j * ni + i]) / hx;
      s += d * d;
    }
  for (int j = 0; j + 1 < nj; ++j)
    for (int i = 0; i < ni; ++i) {
      const double d = (e[(j + 1) * ni + i] - e[j * ni + i]) / hy;
      s += d * d;
    }
  return s;
}

std::vector<double> error_of(const Field& f, const PointFn& exact, double t) {
  std::vector<double> e(f.interior_size());
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) e[j * f.ni() + i] = f(i, j) - exact(f.x(i), f.y(j), t);
  return e;
}

}  // namespace

ErrorNorms error_norms(const State& s, const ExactFields& exact, double t) {
  const GridSpec& g = s.phi.grid();
  const double da = g.cell_area(), hx = g.dx(), hy = g.dy();
  ErrorNorms n;
  if (exact.phi) {
    const auto e = error_of(s.phi, exact.phi, t);
    n.l2_phi = std::sqrt(sum_sq(e) * da);
    n.h1semi_phi = std::sqrt(diff_sq(e, g.nx, g.ny, hx, hy) * da);
  }
  if (exact.u && exact.v) {
    const auto eu = error_of(s.v.x, exact.u, t);
    const auto ev = error_of(s.v.y, exact.v, t);
    double l2 = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) l2 += eu[j * (g.nx + 1) + i] * eu[j * (g.nx + 1) + i];
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) l2 += ev[j * g.nx + i] * ev[j * g.nx + i];
    n.l2_v = std::sqrt(l2 * da);
    n.h1semi_v = std::sqrt((diff_sq(eu, g.nx + 1, g.ny, hx, hy) + diff_sq(ev, g.nx, g.ny + 1, hx, hy)) * da);
  }
  if (exact.b1 && exact.b2) {
    const auto e1 = error_of(s.b.x, exact.b1, t);
    const auto e2 = error_of(s.b.y, exact.b2, t);
    n.l2_b = std::sqrt((sum_sq(e1) + sum_sq(e2)) * da);
    n.h1semi_b = std::sqrt((diff_sq(e1, g.nx, g.ny, hx, hy) + diff_sq(e2, g.nx, g.ny, hx, hy)) * da);
  }
  if (exact.p) {
    auto e = error_of(s.p, exact.p, t);
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= static_cast<double>(e.size());
    for (double& v : e) v -= mean;
    n.l2_p = std::sqrt(sum_sq(e) * da);
  }
  return n;
}

std::vector<RateRow> rate_table(const std::vector<std::pair<double, ErrorNorms>>& rows) {
  std::vector<RateRow> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [h, e] = rows[r];
    if (!(h > 0.0)) throw ConfigError("rate table: h must be positive");
    RateRow row{h, e, std::nullopt};
    if (r > 0) {
      const double prev = rows[r - 1].first;
      if (std::abs(prev / h - 2.0) > 1e-9) throw ConfigError("rate table: h must halve between rows");
      std::array<double, 7> rates{};
      const auto a = rows[r - 1].second.values(), b = e.values();
      for (std::size_t c = 0; c < rates.size(); ++c) rates[c] = std::log2(a[c] / b[c]);
      row.rates = rates;
    }
    out.push_back(row);
  }
  return out;
}

void write_rate_table(std::ostream& os, const std::vector<RateRow>& table) {
  fmt::print(os, "{:>8}", "h");
  for (const char* name : ErrorNorms::names) fmt::print(os, " {:>12} {:>6}", name, "rate");
  fmt::print(os, "\n");
  for (const auto& row : table) {
    fmt::print(os, "{:>8}", fmt::format("1/{}", std::lround(1.0 / row.h)));
    const auto v = row.errors.values();
    for (std::size_t c = 0; c < v.size(); ++c) {
      fmt::print(os, " {:>12.4e}", v[c]);
      if (row.rates)
        fmt::print(os, " {:>6.2f}", (*row.rates)[c]);
      else
        fmt::print(os, " {:>6}", "-");
    }
    fmt::print(os, "\n");
  }
}

void DiagnosticsRecord::record(const State& s, const EnergyReport& e, double mass, const StepBreakdown& bd) {
  rows_.push_back({s.step, s.time, e.total(), e.kinetic, e.magnetic, e.interfacial, e.potential, e.pressure, mass,
                   bd.div_inf, bd.ch.iterations, bd.magnetic.iterations, bd.momentum.iterations,
                   bd.pressure.iterations});
}

void DiagnosticsRecord::write_csv(std::ostream& os) const {
  os << header << '\n';
  for (const auto& r : rows_)
    fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{}\n", r.k,
               r.t, r.e_total, r.e_kin, r.e_mag, r.e_interf, r.e_pot, r.e_pgrad, r.mass, r.div_inf, r.iters_ch,
               r.iters_b, r.iters_v, r.iters_p);
}

void DiagnosticsRecord::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(os);
}

DiagnosticsRecord DiagnosticsRecord::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != header) throw std::runtime_error("diagnostics CSV: unexpected header");
  DiagnosticsRecord rec;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 14) throw std::runtime_error("diagnostics CSV: expected 14 columns");
    DiagnosticsRow r;
    r.k = std::stol(cells[0]);
    double* reals[] = {&r.t, &r.e_total, &r.e_kin, &r.e_mag, &r.e_interf, &r.e_pot, &r.e_pgrad, &r.mass, &r.div_inf};
    for (int c = 0; c < 9; ++c) *reals[c] = std::stod(cells[1 + c]);
    r.iters_ch = std::stoi(cells[10]);
    r.iters_b = std::stoi(cells[11]);
    r.iters_v = std::stoi(cells[12]);
    r.iters_p = std::stoi(cells[13]);
    rec.rows_.push_back(r);
  }
  return rec;
}

}  // namespace chmhd
