#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "chmhd/harness.hpp"
#include "chmhd/mms.hpp"

namespace {

using namespace chmhd;

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

struct Flags {
  std::string config;
  std::string scheme;
  std::optional<double> dt;
  std::string grid;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_lorentz = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "key = value configuration file");
  sub->add_option("--scheme", f.scheme, "I, II or III");
  sub->add_option("--dt", f.dt, "time step");
  sub->add_option("--grid", f.grid, "NX or NXxNY; for mms a comma list of levels");
  sub->add_option("--seed", f.seed, "PRNG seed (spinodal)");
  sub->add_option("--out", f.out, "output directory");
}

std::vector<int> parse_ints(const std::string& s, char sep) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(sep, start);
    const std::string item = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--grid: cannot parse '" + s + "'");
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

RunConfig build_config(Experiment e, const Flags& f) {
  RunConfig cfg = RunConfig::defaults(e);
  if (!f.config.empty()) cfg.apply(load_config(f.config));
  if (!f.scheme.empty()) cfg.scheme.scheme = parse_scheme(f.scheme);
  if (f.dt) {
    cfg.scheme.dt = *f.dt;
    if (e == Experiment::mms) cfg.mms_dt = *f.dt;
  }
  if (!f.grid.empty()) {
    if (e == Experiment::mms) {
      cfg.mms_levels = parse_ints(f.grid, ',');
    } else {
      const auto dims = parse_ints(f.grid, 'x');
      if (dims.size() > 2) throw ConfigError("--grid: expected NX or NXxNY");
      cfg.grid = GridSpec(dims[0], dims.size() == 2 ? dims[1] : dims[0], cfg.grid.lx, cfg.grid.ly);
    }
  }
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.no_lorentz) cfg.lorentz = false;
  cfg.validate();
  return cfg;
}

int run_mms_cmd(const RunConfig& cfg) {
  fmt::print("manufactured solution, scheme {}, T = {:g}\n", to_string(cfg.scheme.scheme), cfg.scheme.T);
  const MmsResult res = run_mms(cfg, &std::cerr);
  write_rate_table(std::cout, res.table);
  if (!res.ok) {
    fmt::print(std::cerr, "solver failure: {}\n", res.error);
    return kSolverFailure;
  }
  return kOk;
}

int run_spinodal_cmd(const RunConfig& cfg) {
  const SpinodalResult res = run_spinodal(cfg, &std::cerr);
  for (const auto& w : res.warnings) fmt::print(std::cerr, "warning: {}\n", w);
  const EnergyCheck ec = check_energy(res.initial_energy.total(), res.record, 1e-8);
  double drift = 0.0;
  for (const auto& row : res.record.rows()) drift = std::max(drift, std::abs(row.mass - res.initial_mass));
  fmt::print("spinodal scheme {} dt={:g} steps={} seed={}\n", to_string(cfg.scheme.scheme), cfg.scheme.dt,
             res.record.size(), *cfg.seed);
  fmt::print("E0 = {:.12e}  E_end = {:.12e}  energy nonincreasing: {}\n", res.initial_energy.total(),
             res.record.empty() ? res.initial_energy.total() : res.record.rows().back().e_total,
             ec.nonincreasing ? "yes" : "no");
  fmt::print("max mass drift = {:.3e}\n", drift);
  if (!res.ok) {
    fmt::print(std::cerr, "solver failure: {}\n", res.error);
    return kSolverFailure;
  }
  return kOk;
}

int run_boussinesq_cmd(const RunConfig& cfg) {
  const BoussinesqResult res = run_boussinesq(cfg, &std::cerr);
  for (const auto& w : res.warnings) fmt::print(std::cerr, "warning: {}\n", w);
  fmt::print("boussinesq scheme {} lorentz={} mu={:g}\n", to_string(cfg.scheme.scheme), cfg.lorentz ? "on" : "off",
             cfg.params.mu);
  fmt::print("{:>8} {:>12} {:>12}\n", "t", "centroid_x", "centroid_y");
  for (const auto& c : res.centroids) fmt::print("{:>8g} {:>12.6f} {:>12.6f}\n", c.t, c.x, c.y);
  if (!res.ok) {
    fmt::print(std::cerr, "solver failure: {}\n", res.error);
    return kSolverFailure;
  }
  return kOk;
}

int run_check_cmd(int n) {
  const mms::ExactSolution ex;
  double worst = 0.0;
  fmt::print("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "t", "phase", "chem", "momentum", "magnetic",
             "div_v", "div_b");
  for (double t : {0.3, 1.0}) {
    const mms::Residuals r = mms::residual_oracle(ex, n, t);
    fmt::print("{:>6g} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}\n", t, r.phase, r.chem,
               r.momentum, r.magnetic, r.div_v, r.div_b);
    worst = std::max(worst, r.max());
  }
  const bool pass = worst <= 1e-6;
  fmt::print("max residual {:.3e} on {}x{}: {}\n", worst, n, n, pass ? "PASS" : "FAIL");
  return pass ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase MHD solver: manufactured-solution, spinodal and rising-bubble drivers"};
  app.require_subcommand(1);
  Flags flags;
  int check_n = 128;
  auto* mms_cmd = app.add_subcommand("mms", "convergence sweep against the manufactured solution");
  auto* spin_cmd = app.add_subcommand("spinodal", "spinodal decomposition with periodic phase field");
  auto* bous_cmd = app.add_subcommand("boussinesq", "rising bubble under buoyancy and a vertical field");
  auto* check_cmd = app.add_subcommand("check", "residual oracle for the manufactured sources");
  for (auto* sub : {mms_cmd, spin_cmd, bous_cmd}) add_common(sub, flags);
  bous_cmd->add_flag("--no-lorentz", flags.no_lorentz, "drop the Lorentz force");
  check_cmd->add_option("--grid", check_n, "points per direction")->check(CLI::Range(8, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (check_cmd->parsed()) return run_check_cmd(check_n);
    if (mms_cmd->parsed()) return run_mms_cmd(build_config(Experiment::mms, flags));
    if (spin_cmd->parsed()) return run_spinodal_cmd(build_config(Experiment::spinodal, flags));
    if (bous_cmd->parsed()) return run_boussinesq_cmd(build_config(Experiment::boussinesq, flags));
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "configuration error: {}\n", e.what());
    return kConfigError;
  } catch (const SolverError& e) {
    fmt::print(std::cerr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kSolverFailure;
  }
  return kOk;
}
