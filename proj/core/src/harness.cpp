#include "chmhd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "chmhd/io.hpp"
#include "chmhd/mms.hpp"

namespace chmhd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    const std::uint64_t d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

template <class T, class Fn>
std::vector<T> to_list(const std::string& key, std::string v, Fn&& conv) {
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<T>(conv(key, item)));
  }
  return out;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string dt_tag(double dt) { return fmt::format("{:g}", dt); }

double div_ratio(const StepBreakdown& bd) {
  return bd.pressure.threshold > 0.0 ? bd.div_inf / bd.pressure.threshold : 0.0;
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::mms: return "mms";
    case Experiment::spinodal: return "spinodal";
    case Experiment::boussinesq: return "boussinesq";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  if (s == "mms") return Experiment::mms;
  if (s == "spinodal") return Experiment::spinodal;
  if (s == "boussinesq") return Experiment::boussinesq;
  throw ConfigError("unknown experiment '" + s + "'");
}

ConfigMap parse_config(std::istream& is) {
  ConfigMap map;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("config line {}: unterminated section header", lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected key = value", lineno));
    std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(fmt::format("config line {}: empty key", lineno));
    if (!section.empty()) key = section + "." + key;
    map[key] = value;
  }
  return map;
}

ConfigMap load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(is);
}

RunConfig RunConfig::defaults(Experiment e) {
  RunConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::mms:
      c.grid = GridSpec(64, 64);
      c.scheme.T = 1.0;
      c.scheme.dt = 1.0 / (64.0 * 64.0);
      break;
    case Experiment::spinodal:
      c.grid = GridSpec(64, 64);
      c.params.eps = 0.01;
      c.params.lambda = 0.01;
      c.scheme.S = 1.0 / c.params.eps;
      c.scheme.S_prime = 1.0 / c.params.eps;
      c.scheme.dt = 0.01;
      c.scheme.T = 0.5;
      c.seed = 1;
      break;
    case Experiment::boussinesq:
      c.grid = GridSpec(100, 150, 1.0, 1.5);
      c.params.nu = 1.0;
      c.params.mu = 0.001;
      c.params.sigma_pair = std::pair{300.0, 400.0};
      c.params.mobility = 1e-4;
      c.params.eps = 0.01;
      c.params.lambda = 5.0;
      c.scheme.S = 1.0;
      c.scheme.dt = 1e-3;
      c.scheme.T = 3.0;
      break;
  }
  return c;
}

void RunConfig::apply(const ConfigMap& map) {
  std::optional<double> sigma1, sigma2;
  for (const auto& [key, value] : map) {
    if (key == "experiment") {
      if (parse_experiment(value) != experiment)
        throw ConfigError("config file is for experiment '" + value + "', not '" + to_string(experiment) + "'");
    }
    else if (key == "scheme" || key == "scheme.name") scheme.scheme = parse_scheme(value);
    else if (key == "seed") seed = to_u64(key, value);
    else if (key == "steps") steps = static_cast<int>(to_long(key, value));
    else if (key == "grid.nx") grid.nx = static_cast<int>(to_long(key, value));
    else if (key == "grid.ny") grid.ny = static_cast<int>(to_long(key, value));
    else if (key == "grid.lx") grid.lx = to_double(key, value);
    else if (key == "grid.ly") grid.ly = to_double(key, value);
    else if (key == "time.dt" || key == "dt") scheme.dt = to_double(key, value);
    else if (key == "time.T" || key == "T") scheme.T = to_double(key, value);
    else if (key == "params.nu") params.nu = to_double(key, value);
    else if (key == "params.mu") params.mu = to_double(key, value);
    else if (key == "params.lambda") params.lambda = to_double(key, value);
    else if (key == "params.sigma") params.sigma = to_double(key, value);
    else if (key == "params.sigma1") sigma1 = to_double(key, value);
    else if (key == "params.sigma2") sigma2 = to_double(key, value);
    else if (key == "params.mobility" || key == "params.M") params.mobility = to_double(key, value);
    else if (key == "params.eps") params.eps = to_double(key, value);
    else if (key == "scheme.S") scheme.S = to_double(key, value);
    else if (key == "scheme.S_prime") scheme.S_prime = to_double(key, value);
    else if (key == "scheme.C") scheme.C = to_double(key, value);
    else if (key == "output.dir") out_dir = value;
    else if (key == "output.snapshot_every") snapshot_every = static_cast<int>(to_long(key, value));
    else if (key == "mms.levels") mms_levels = to_list<int>(key, value, to_long);
    else if (key == "mms.dt") mms_dt = to_double(key, value);
    else if (key == "spinodal.phi_mean") phi_mean = to_double(key, value);
    else if (key == "spinodal.noise") noise = to_double(key, value);
    else if (key == "boussinesq.rho1") rho1 = to_double(key, value);
    else if (key == "boussinesq.rho2") rho2 = to_double(key, value);
    else if (key == "boussinesq.gravity") gravity = to_double(key, value);
    else if (key == "boussinesq.lorentz") lorentz = to_bool(key, value);
    else if (key == "boussinesq.snapshot_times") snapshot_times = to_list<double>(key, value, to_double);
    else if (key == "boussinesq.bubble_radius") bubble_radius = to_double(key, value);
    else if (key == "boussinesq.bubble_x") bubble_x = to_double(key, value);
    else if (key == "boussinesq.bubble_y") bubble_y = to_double(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (sigma1 || sigma2) {
    if (!(sigma1 && sigma2)) throw ConfigError("params.sigma1 and params.sigma2 must be given together");
    params.sigma_pair = std::pair{*sigma1, *sigma2};
  }
}

void RunConfig::validate() const {
  GridSpec(grid.nx, grid.ny, grid.lx, grid.ly);
  params.validate(grid);
  scheme.validate(params);
  if (seed.has_value() != (experiment == Experiment::spinodal))
    throw ConfigError("a seed is required for spinodal runs and not accepted otherwise");
  if (snapshot_every < 0) throw ConfigError("output.snapshot_every must be nonnegative");
  if (steps < 0) throw ConfigError("steps must be nonnegative");
  if (experiment == Experiment::mms) {
    if (mms_levels.empty()) throw ConfigError("mms.levels is empty");
    for (int n : mms_levels)
      if (n < 4) throw ConfigError("mms.levels entries must be at least 4");
    if (mms_dt && !(*mms_dt > 0.0)) throw ConfigError("mms.dt must be positive");
  }
  if (experiment == Experiment::spinodal && !(noise >= 0.0)) throw ConfigError("spinodal.noise must be >= 0");
  if (experiment == Experiment::boussinesq) {
    if (!(rho1 > 0.0 && rho2 > 0.0)) throw ConfigError("densities must be positive");
    if (!(bubble_radius > 0.0)) throw ConfigError("bubble radius must be positive");
  }
}

int RunConfig::step_count() const {
  if (steps > 0) return steps;
  const double n = scheme.T / scheme.dt;
  const long k = std::lround(n);
  if (k < 1) throw ConfigError("T / dt gives no steps");
  if (std::abs(n - static_cast<double>(k)) > 1e-6 * n)
    throw ConfigError("T is not an integer multiple of dt");
  return static_cast<int>(k);
}

Field spinodal_initial_phase(const GridSpec& grid, double phi_mean, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> r(grid.cells());
  for (double& x : r) x = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= static_cast<double>(r.size());
  for (double& x : r) x = phi_mean + noise * (x - mean);
  Field phi(grid, Location::cell);
  phi.set_interior(r);
  return phi;
}

Field bubble_phase(const GridSpec& grid, double x0, double y0, double r0, double eps) {
  Field phi(grid, Location::cell);
  phi.sample([&](double x, double y) {
    return std::tanh((r0 - std::hypot(x - x0, y - y0)) / (std::sqrt(2.0) * eps));
  });
  return phi;
}

std::pair<double, double> centroid(const Field& phi) {
  double m = 0.0, mx = 0.0, my = 0.0;
  for (int j = 0; j < phi.nj(); ++j)
    for (int i = 0; i < phi.ni(); ++i) {
      const double c = 0.5 * (1.0 + phi(i, j));
      m += c;
      mx += c * phi.x(i);
      my += c * phi.y(j);
    }
  if (!(m > 0.0)) throw std::runtime_error("centroid of an empty phase");
  return {mx / m, my / m};
}

EnergyCheck check_energy(double e0, const DiagnosticsRecord& rec, double rel_tol) {
  EnergyCheck c;
  double prev = e0;
  for (const auto& row : rec.rows()) {
    const double rel = (row.e_total - prev) / std::max(std::abs(prev), 1e-300);
    if (c.worst_step < 0 || rel > c.worst_rel_increase) {
      c.worst_rel_increase = rel;
      c.worst_step = row.k;
    }
    if (rel > rel_tol) c.nonincreasing = false;
    prev = row.e_total;
  }
  return c;
}

MmsLevel run_mms_level(const RunConfig& cfg, int n, double dt, double T) {
  const mms::ExactSolution ex(cfg.params);
  SchemeConfig sc = cfg.scheme;
  sc.dt = dt;
  sc.T = T;
  Integrator integ(mms::make_problem(ex, n, sc));
  State s = mms::initial_state(integ, ex);
  const long steps = std::lround(T / dt);
  MmsLevel lvl;
  lvl.n = n;
  lvl.dt = dt;
  for (long k = 0; k < steps; ++k) {
    auto [next, bd] = integ.advance(s);
    s = std::move(next);
    lvl.record.record(s, integ.energy(s), integ.mass(s), bd);
    lvl.worst_div_ratio = std::max(lvl.worst_div_ratio, div_ratio(bd));
  }
  const ExactFields exact{
      [ex](double x, double y, double t) { return ex.phi(x, y, t); },
      [ex](double x, double y, double t) { return ex.u(x, y, t); },
      [ex](double x, double y, double t) { return ex.v(x, y, t); },
      [ex](double x, double y, double t) { return ex.p(x, y, t); },
      [ex](double x, double y, double t) { return ex.b1(x, y, t); },
      [ex](double x, double y, double t) { return ex.b2(x, y, t); },
  };
  lvl.errors = error_norms(s, exact, s.time);
  return lvl;
}

MmsResult run_mms(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  MmsResult res;
  std::vector<std::pair<double, ErrorNorms>> rows;
  for (int n : cfg.mms_levels) {
    const double h = 1.0 / n;
    const double dt = cfg.mms_dt ? *cfg.mms_dt : h * h;
    try {
      MmsLevel lvl = run_mms_level(cfg, n, dt, cfg.scheme.T);
      if (log) fmt::print(*log, "level n={} dt={:g}: l2_phi={:.4e} l2_v={:.4e} l2_b={:.4e}\n", n, dt,
                          lvl.errors.l2_phi, lvl.errors.l2_v, lvl.errors.l2_b);
      if (!cfg.out_dir.empty())
        lvl.record.write_csv(join(cfg.out_dir, fmt::format("mms_{}_n{}.csv", to_string(cfg.scheme.scheme), n)));
      rows.emplace_back(h, lvl.errors);
      res.levels.push_back(std::move(lvl));
    } catch (const SolverError& e) {
      res.ok = false;
      res.error = fmt::format("level n={}: {}", n, e.what());
      break;
    }
  }
  if (!rows.empty()) res.table = rate_table(rows);
  if (!cfg.out_dir.empty() && !res.table.empty()) {
    std::ofstream os(join(cfg.out_dir, fmt::format("mms_{}_rates.csv", to_string(cfg.scheme.scheme))));
    os << "h";
    for (const char* name : ErrorNorms::names) os << ',' << name << ",rate_" << name;
    os << '\n';
    for (const auto& row : res.table) {
      fmt::print(os, "{:.17g}", row.h);
      const auto v = row.errors.values();
      for (std::size_t c = 0; c < v.size(); ++c) {
        fmt::print(os, ",{:.17g},", v[c]);
        if (row.rates) fmt::print(os, "{:.17g}", (*row.rates)[c]);
      }
      os << '\n';
    }
  }
  return res;
}

SpinodalResult run_spinodal(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  Problem pb;
  pb.grid = cfg.grid;
  pb.params = cfg.params;
  pb.scheme = cfg.scheme;
  pb.phase_rule = BoundaryRule::periodic();
  pb.velocity_rule = VelocityRule::no_slip();
  pb.magnetic_rule = MagneticRule::tangential();
  Integrator integ(pb);

  SpinodalResult res;
  res.warnings = integ.warnings();
  const Field phi0 = spinodal_initial_phase(cfg.grid, cfg.phi_mean, cfg.noise, *cfg.seed);
  State s = integ.initial_state(phi0, VectorField::mac(cfg.grid), Field(cfg.grid, Location::cell),
                                VectorField::cell(cfg.grid));
  res.initial_energy = integ.energy(s);
  res.initial_mass = integ.mass(s);
  const std::string stem = fmt::format("spinodal_{}_dt{}", to_string(cfg.scheme.scheme), dt_tag(cfg.scheme.dt));
  const int steps = cfg.step_count();
  try {
    for (int k = 0; k < steps; ++k) {
      auto [next, bd] = integ.advance(s);
      s = std::move(next);
      res.record.record(s, integ.energy(s), integ.mass(s), bd);
      res.worst_div_ratio = std::max(res.worst_div_ratio, div_ratio(bd));
      if (!cfg.out_dir.empty() && cfg.snapshot_every > 0 && s.step % cfg.snapshot_every == 0) {
        write_vtk(join(cfg.out_dir, fmt::format("{}_{:06d}.vtk", stem, s.step)), s);
        write_snapshot(join(cfg.out_dir, fmt::format("{}_{:06d}.chmhd", stem, s.step)), s);
      }
      if (log && (k + 1) % std::max(1, steps / 10) == 0)
        fmt::print(*log, "step {}/{} t={:g} E={:.10e}\n", k + 1, steps, s.time, res.record.rows().back().e_total);
    }
  } catch (const SolverError& e) {
    res.ok = false;
    res.error = e.what();
  }
  if (!cfg.out_dir.empty()) res.record.write_csv(join(cfg.out_dir, stem + ".csv"));
  return res;
}

BoussinesqResult run_boussinesq(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  const double rho0 = 0.5 * (cfg.rho1 + cfg.rho2);
  Problem pb;
  pb.grid = cfg.grid;
  pb.params = cfg.params;
  pb.scheme = cfg.scheme;
  pb.phase_rule = BoundaryRule::neumann();
  pb.velocity_rule.walls = {Wall::free_slip, Wall::free_slip, Wall::no_slip, Wall::no_slip};
  // n x b = n x (0, 1): b_y = 1 on the side walls, b_x = 0 on top and bottom.
  SideData tangential;
  tangential.left = [](double, double) { return 1.0; };
  tangential.right = [](double, double) { return 1.0; };
  pb.magnetic_rule = MagneticRule::tangential(tangential);
  pb.rho0 = rho0;
  pb.lorentz = cfg.lorentz;
  const double g = cfg.gravity, r1 = cfg.rho1 - rho0, r2 = cfg.rho2 - rho0;
  pb.body_force = [g, r1, r2](double, const Field& phi, VectorField& force) {
    const GridSpec& grid = phi.grid();
    for (int j = 1; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const double pf = 0.5 * (phi(i, j - 1) + phi(i, j));
        force.y(i, j) += -(1.0 + pf) * g * r1 - (1.0 - pf) * g * r2;
      }
  };
  Integrator integ(pb);

  BoussinesqResult res;
  res.warnings = integ.warnings();
  const Field phi0 = bubble_phase(cfg.grid, cfg.bubble_x, cfg.bubble_y, cfg.bubble_radius, cfg.params.eps);
  VectorField b0 = VectorField::cell(cfg.grid);
  b0.y.fill(1.0);
  State s = integ.initial_state(phi0, VectorField::mac(cfg.grid), Field(cfg.grid, Location::cell), b0);
  res.initial_mass = integ.mass(s);

  const std::string stem = fmt::format("boussinesq_{}", cfg.lorentz ? "lorentz" : "nolorentz");
  const int steps = cfg.step_count();
  const double dt = cfg.scheme.dt;
  std::vector<double> times;
  for (double t : cfg.snapshot_times)
    if (t <= s.time + steps * dt + 0.5 * dt) times.push_back(t);
  std::sort(times.begin(), times.end());
  std::size_t next_snap = 0;
  try {
    for (int k = 0; k < steps; ++k) {
      auto [next, bd] = integ.advance(s);
      s = std::move(next);
      res.record.record(s, integ.energy(s), integ.mass(s), bd);
      res.worst_div_ratio = std::max(res.worst_div_ratio, div_ratio(bd));
      const bool last = k + 1 == steps;
      bool snap = false;
      while (next_snap < times.size() && times[next_snap] <= s.time + 0.5 * dt) {
        snap = true;
        ++next_snap;
      }
      if (snap || (last && (res.centroids.empty() || res.centroids.back().t != s.time))) {
        const auto [cx, cy] = centroid(s.phi);
        res.centroids.push_back({s.time, cx, cy});
        if (log) fmt::print(*log, "t={:g} centroid=({:.6f}, {:.6f})\n", s.time, cx, cy);
        if (!cfg.out_dir.empty()) {
          write_vtk(join(cfg.out_dir, fmt::format("{}_t{:g}.vtk", stem, s.time)), s);
          write_snapshot(join(cfg.out_dir, fmt::format("{}_t{:g}.chmhd", stem, s.time)), s);
        }
      }
      if (!cfg.out_dir.empty() && cfg.snapshot_every > 0 && s.step % cfg.snapshot_every == 0)
        write_snapshot(join(cfg.out_dir, fmt::format("{}_{:06d}.chmhd", stem, s.step)), s);
    }
  } catch (const SolverError& e) {
    res.ok = false;
    res.error = e.what();
  }
  if (!cfg.out_dir.empty()) res.record.write_csv(join(cfg.out_dir, stem + ".csv"));
  return res;
}

}  // namespace chmhd
