// Runs the nine acceptance criteria and prints one PASS/FAIL line each.
// Exit status is 0 when the failing sub-checks are exactly the --expect-fail set.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "chmhd/harness.hpp"
#include "chmhd/mms.hpp"
#include "chmhd/operators.hpp"

namespace {

using namespace chmhd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  std::string id;
  bool pass = true;
  std::string detail;
};

struct Criterion {
  Criterion(int number, std::string title) : number(number), title(std::move(title)) {}

  int number;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  void add(std::string id, bool pass, std::string detail) {
    checks.push_back({fmt::format("{}.{}", number, id), pass, std::move(detail)});
  }
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

/// Shared results: several criteria are judged on the same runs.
struct Runs {
  std::vector<std::pair<std::string, SpinodalResult>> spinodal;
  double spinodal_seconds_I_III = 0.0;
  double spinodal_seconds_II = 0.0;
  /// Worst ||div v||_inf over the pressure threshold, per run label.
  std::vector<std::pair<std::string, double>> div_ratios;
};

const double kSpinodalDts[] = {1.0, 0.1, 0.01, 0.001, 0.0001};

RunConfig spinodal_config(Scheme s, double dt, const std::string& out) {
  RunConfig cfg = RunConfig::defaults(Experiment::spinodal);
  cfg.scheme.scheme = s;
  cfg.scheme.dt = dt;
  cfg.scheme.C = 1.0;
  cfg.steps = 50;
  cfg.out_dir = out;
  return cfg;
}

void run_spinodals(Runs& runs, const fs::path& out) {
  for (Scheme s : {Scheme::I, Scheme::III, Scheme::II}) {
    const auto t0 = Clock::now();
    for (double dt : kSpinodalDts) {
      const std::string label = fmt::format("spinodal {} dt={:g}", to_string(s), dt);
      SpinodalResult r = run_spinodal(spinodal_config(s, dt, (out / "spinodal").string()));
      runs.div_ratios.emplace_back(label, r.worst_div_ratio);
      runs.spinodal.emplace_back(label, std::move(r));
    }
    (s == Scheme::II ? runs.spinodal_seconds_II : runs.spinodal_seconds_I_III) += seconds_since(t0);
  }
}

Criterion energy_criterion(const Runs& runs, int number, bool scheme_II) {
  Criterion c{number, scheme_II ? "energy dissipation, Scheme II (C = 1)" : "energy dissipation, Schemes I and III"};
  for (const auto& [label, r] : runs.spinodal) {
    const bool is_II = label.find(" II ") != std::string::npos;
    if (is_II != scheme_II) continue;
    const EnergyCheck ec = check_energy(r.initial_energy.total(), r.record, 1e-8);
    const bool ok = r.ok && r.record.size() == 50 && ec.nonincreasing;
    c.add("energy", ok,
          fmt::format("{}: {} steps, worst relative increase {:.2e} at step {}{}", label, r.record.size(),
                      ec.worst_rel_increase, ec.worst_step, r.ok ? "" : " (" + r.error + ")"));
  }
  const double secs = scheme_II ? runs.spinodal_seconds_II : runs.spinodal_seconds_I_III;
  if (!scheme_II) c.add("runtime", secs <= 180.0, fmt::format("{:.1f} s of 180 s", secs));
  return c;
}

Criterion mass_criterion(const Runs& runs) {
  Criterion c{3, "mass conservation"};
  double worst = 0.0;
  std::string where;
  for (const auto& [label, r] : runs.spinodal)
    for (const auto& row : r.record.rows()) {
      const double drift = std::abs(row.mass - r.initial_mass);
      if (drift >= worst) {
        worst = drift;
        where = label;
      }
    }
  c.add("mass", worst <= 1e-9, fmt::format("max |mass drift| {:.2e} ({}), bound 1e-9", worst, where));
  return c;
}

// ---- criterion 4 ---------------------------------------------------------------

Field difference(const Field& a, const Field& b) {
  Field d = a;
  auto sd = d.storage();
  auto sb = b.storage();
  for (std::size_t k = 0; k < sd.size(); ++k) sd[k] -= sb[k];
  return d;
}

VectorField difference(const VectorField& a, const VectorField& b) {
  return {a.kind, difference(a.x, b.x), difference(a.y, b.y)};
}

ExactFields exact_fields(const mms::ExactSolution& ex) {
  return {[ex](double x, double y, double t) { return ex.phi(x, y, t); },
          [ex](double x, double y, double t) { return ex.u(x, y, t); },
          [ex](double x, double y, double t) { return ex.v(x, y, t); },
          [ex](double x, double y, double t) { return ex.p(x, y, t); },
          [ex](double x, double y, double t) { return ex.b1(x, y, t); },
          [ex](double x, double y, double t) { return ex.b2(x, y, t); }};
}

Criterion temporal_criterion(Runs& runs, std::ostream& report) {
  Criterion c{4, "temporal first order (h = 1/64, T = 0.5)"};
  const auto t0 = Clock::now();
  const mms::ExactSolution ex;
  const int divisions[] = {10, 20, 40, 80};
  double worst[3] = {1.0, 1.0, 1.0};  // order farthest from 1 per field
  std::string per_scheme;
  for (Scheme s : {Scheme::I, Scheme::II, Scheme::III}) {
    std::vector<State> finals;
    for (int m : divisions) {
      SchemeConfig sc;
      sc.scheme = s;
      sc.dt = 1.0 / m;
      sc.T = 0.5;
      const Integrator integ(mms::make_problem(ex, 64, sc));
      State st = mms::initial_state(integ, ex);
      double ratio = 0.0;
      for (int k = 0; k < m / 2; ++k) {
        auto [next, bd] = integ.advance(st);
        st = std::move(next);
        ratio = std::max(ratio, bd.pressure.threshold > 0 ? bd.div_inf / bd.pressure.threshold : 0.0);
      }
      runs.div_ratios.emplace_back(fmt::format("mms temporal {} dt=1/{}", to_string(s), m), ratio);
      const ErrorNorms e = error_norms(st, exact_fields(ex), st.time);
      fmt::print(report, "4: scheme {} dt=1/{}: l2_phi {:.4e} l2_v {:.4e} l2_b {:.4e}\n", to_string(s), m, e.l2_phi,
                 e.l2_v, e.l2_b);
      finals.push_back(std::move(st));
    }
    // Richardson order from successive differences of the three finest runs;
    // differences cancel the dt-independent spatial error.
    const State &a = finals[1], &b = finals[2], &d = finals[3];
    const double orders[3] = {
        std::log2(norm_l2(difference(a.phi, b.phi)) / norm_l2(difference(b.phi, d.phi))),
        std::log2(norm_l2(difference(a.v, b.v)) / norm_l2(difference(b.v, d.v))),
        std::log2(norm_l2(difference(a.b, b.b)) / norm_l2(difference(b.b, d.b))),
    };
    fmt::print(report, "4: scheme {} Richardson orders phi {:.3f} v {:.3f} b {:.3f}\n", to_string(s), orders[0],
               orders[1], orders[2]);
    per_scheme += fmt::format(" {}:({:.2f},{:.2f},{:.2f})", to_string(s), orders[0], orders[1], orders[2]);
    for (int f = 0; f < 3; ++f)
      if (std::abs(orders[f] - 1.0) > std::abs(worst[f] - 1.0)) worst[f] = orders[f];
  }
  const char* names[] = {"l2_phi", "l2_v", "l2_b"};
  for (int f = 0; f < 3; ++f)
    c.add(names[f], worst[f] >= 0.8 && worst[f] <= 1.2,
          fmt::format("{}: worst order {:.3f}, orders (phi,v,b) per scheme{}", names[f], worst[f], per_scheme));
  const double secs = seconds_since(t0);
  c.add("runtime", secs <= 300.0, fmt::format("{:.1f} s of 300 s", secs));
  return c;
}

// ---- criterion 5 ---------------------------------------------------------------

Criterion spatial_criterion(Runs& runs, std::ostream& report) {
  Criterion c{5, "space-time rates (h = 1/8 .. 1/64, dt = h^2, T = 1)"};
  struct Target {
    const char* name;
    std::size_t column;
    double lo, hi;
  };
  const Target targets[] = {{"l2_phi", 0, 1.7, 2.3},
                            {"l2_v", 2, 1.7, 2.3},
                            {"l2_b", 4, 1.7, 2.3},
                            {"h1semi_phi", 1, 0.8, 1.2},
                            {"h1semi_b", 5, 0.8, 1.2}};
  std::vector<std::string> rates(std::size(targets));
  std::vector<bool> ok(std::size(targets), true);
  double slowest = 0.0;
  for (Scheme s : {Scheme::I, Scheme::II, Scheme::III}) {
    const auto t0 = Clock::now();
    RunConfig cfg = RunConfig::defaults(Experiment::mms);
    cfg.scheme.scheme = s;
    cfg.scheme.T = 1.0;
    cfg.mms_levels = {8, 16, 32, 64};
    const MmsResult r = run_mms(cfg);
    slowest = std::max(slowest, seconds_since(t0));
    for (const auto& lvl : r.levels)
      runs.div_ratios.emplace_back(fmt::format("mms sweep {} n={}", to_string(s), lvl.n), lvl.worst_div_ratio);
    fmt::print(report, "5: scheme {}\n", to_string(s));
    write_rate_table(report, r.table);
    if (!r.ok || r.table.size() != 4 || !r.table.back().rates) {
      for (std::size_t k = 0; k < std::size(targets); ++k) {
        ok[k] = false;
        rates[k] += fmt::format(" {}:failed", to_string(s));
      }
      continue;
    }
    const auto& finest = *r.table.back().rates;
    for (std::size_t k = 0; k < std::size(targets); ++k) {
      const double rate = finest[targets[k].column];
      ok[k] = ok[k] && rate >= targets[k].lo && rate <= targets[k].hi;
      rates[k] += fmt::format(" {}:{:.2f}", to_string(s), rate);
    }
  }
  for (std::size_t k = 0; k < std::size(targets); ++k)
    c.add(targets[k].name, ok[k],
          fmt::format("{} rates in [{}, {}]?{}", targets[k].name, targets[k].lo, targets[k].hi, rates[k]));
  c.add("runtime", slowest <= 600.0, fmt::format("slowest scheme {:.1f} s of 600 s", slowest));
  return c;
}

// ---- criterion 7 ---------------------------------------------------------------

Criterion boussinesq_criterion(Runs& runs, const fs::path& out, std::ostream& report) {
  Criterion c{7, "Lorentz suppression of the rising bubble (h = 1/100, T = 1)"};
  const auto t0 = Clock::now();
  BoussinesqResult res[2];
  for (int k = 0; k < 2; ++k) {
    RunConfig cfg = RunConfig::defaults(Experiment::boussinesq);
    cfg.scheme.T = 1.0;
    cfg.lorentz = k == 0;
    cfg.snapshot_times = {0.5, 1.0};
    cfg.out_dir = (out / "boussinesq").string();
    res[k] = run_boussinesq(cfg);
    runs.div_ratios.emplace_back(k == 0 ? "boussinesq lorentz" : "boussinesq no lorentz", res[k].worst_div_ratio);
    for (const auto& cs : res[k].centroids)
      fmt::print(report, "7: lorentz={} t={:g} centroid ({:.6f}, {:.6f})\n", k == 0 ? "on" : "off", cs.t, cs.x, cs.y);
  }
  const double secs = seconds_since(t0);
  const bool ran = res[0].ok && res[1].ok && !res[0].centroids.empty() && !res[1].centroids.empty() &&
                   std::abs(res[0].centroids.back().t - 1.0) < 1e-9 && std::abs(res[1].centroids.back().t - 1.0) < 1e-9;
  if (!ran) {
    c.add("suppression", false, fmt::format("run failed: {} {}", res[0].error, res[1].error));
    return c;
  }
  const double y_on = res[0].centroids.back().y, y_off = res[1].centroids.back().y;
  const double margin = 0.01 * 1.5;
  c.add("suppression", y_on < y_off - margin,
        fmt::format("centroid y {:.6f} with Lorentz vs {:.6f} without, margin {:.4f} (need {:.3f})", y_on, y_off,
                    y_off - y_on, margin));
  double asym = 0.0;
  for (const auto& r : res)
    for (const auto& cs : r.centroids) asym = std::max(asym, std::abs(cs.x - 0.5));
  c.add("symmetry", asym <= 1e-4, fmt::format("max |x - 0.5| {:.2e}", asym));
  c.add("runtime", secs <= 900.0, fmt::format("{:.1f} s of 900 s", secs));
  return c;
}

// ---- criterion 8 ---------------------------------------------------------------

Criterion oracle_criterion() {
  Criterion c{8, "oracle suites"};
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_field = [&](const GridSpec& g, Location loc) {
    Field f(g, loc);
    for (double& x : f.storage()) x = uni(gen);
    return f;
  };
  auto random_mac = [&](const GridSpec& g) {
    VectorField v = VectorField::mac(g);
    std::vector<double> x(Layout{g}.faces());
    for (double& e : x) e = uni(gen);
    unpack_velocity(x, v);
    return v;
  };

  const GridSpec g(16, 16);
  double adj_gd = 0.0, adj_curl = 0.0, div_curl = 0.0, skew = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Field f = random_field(g, Location::cell);
    apply_boundary(f, BoundaryRule::neumann(), 0.0);
    const VectorField v = random_mac(g);
    adj_gd = std::max(adj_gd, std::abs(inner(grad_to_faces(f), v) + inner(f, div_from_faces(v))));

    const Field s = random_field(g, Location::node);
    VectorField b{VectorKind::cell, random_field(g, Location::cell), random_field(g, Location::cell)};
    apply_boundary(b, MagneticRule::tangential(), 0.0);
    adj_curl = std::max(adj_curl, std::abs(inner(curl_of_scalar(s), b) - inner(s, curl_scalar(b))));

    div_curl = std::max(div_curl, max_abs(div_from_faces(curl_of_node_potential(s))));

    VectorField vel = VectorField::mac(g);
    for (double& x : vel.x.storage()) x = uni(gen);
    for (double& x : vel.y.storage()) x = uni(gen);
    const VectorField q = random_mac(g);
    skew = std::max(skew, std::abs(inner(advect_skew(vel, q), q)) / inner(q, q));
  }
  const double worst_op = std::max({adj_gd, adj_curl, div_curl, skew});
  c.add("operators", worst_op <= 1e-12,
        fmt::format("grad/div {:.1e}, curl pair {:.1e}, div curl {:.1e}, skew {:.1e}", adj_gd, adj_curl, div_curl,
                    skew));

  // 20 x 20 systems against dense references
  const GridSpec g20(20, 20);
  const StencilContext ctx(g20, BoundaryRule::neumann(), VelocityRule::no_slip());
  const int n = ctx.layout().cells();
  const CsrMatrix spd = add(identity(n), ctx.laplacian(), 1.0, -1e-3);
  std::vector<double> x(n), rhs(n);
  for (double& e : x) e = uni(gen);
  for (double& e : rhs) e = uni(gen);
  const std::vector<double> dense = to_dense(spd);
  double spmv_err = 0.0;
  const std::vector<double> y = spmv(spd, x);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += dense[i * n + j] * x[j];
    spmv_err = std::max(spmv_err, std::abs(s - y[i]));
  }
  const std::vector<double> ref = dense_solve(dense, rhs);
  double solve_err = 0.0;
  for (Method m : {Method::cg, Method::bicgstab}) {
    const auto [sol, rep] = solve(spd, rhs, SolverConfig{.rel_tol = 1e-13, .method = m});
    for (int i = 0; i < n; ++i) solve_err = std::max(solve_err, std::abs(sol[i] - ref[i]));
  }
  // nonsymmetric: shifted Neumann Laplacian plus a first-difference drift
  CsrBuilder drift(n, n);
  for (int j = 0; j < 20; ++j)
    for (int i = 0; i + 1 < 20; ++i) {
      drift.add(j * 20 + i, j * 20 + i + 1, 30.0);
      drift.add(j * 20 + i + 1, j * 20 + i, -30.0);
    }
  const CsrMatrix nonsym = add(add(identity(n), ctx.laplacian(), 1.0, -1.0), drift.build());
  const std::vector<double> ref_ns = dense_solve(to_dense(nonsym), rhs);
  const auto [sol_ns, rep_ns] = solve(nonsym, rhs, SolverConfig{.rel_tol = 1e-13, .method = Method::bicgstab});
  double rel_ns = 0.0, scale_ns = 0.0;
  for (int i = 0; i < n; ++i) {
    rel_ns = std::max(rel_ns, std::abs(sol_ns[i] - ref_ns[i]));
    scale_ns = std::max(scale_ns, std::abs(ref_ns[i]));
  }
  c.add("linalg", spmv_err <= 1e-9 && solve_err <= 1e-9 && rel_ns <= 1e-9 * std::max(1.0, scale_ns),
        fmt::format("spmv {:.1e}, SPD solves {:.1e}, nonsymmetric solve {:.1e} on 400 unknowns", spmv_err,
                    solve_err, rel_ns));

  double residual = 0.0;
  for (double t : {0.3, 1.0}) residual = std::max(residual, mms::residual_oracle(mms::ExactSolution{}, 128, t).max());
  c.add("mms_residual", residual <= 1e-6, fmt::format("MMS residual {:.2e} on 128^2", residual));
  return c;
}

// ---- criterion 9 ---------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Criterion determinism_criterion(Runs& runs, const fs::path& out) {
  Criterion c{9, "determinism of seeded spinodal runs"};
  const SpinodalResult r = run_spinodal(spinodal_config(Scheme::I, 0.01, (out / "rerun").string()));
  runs.div_ratios.emplace_back("spinodal rerun", r.worst_div_ratio);
  const std::string name = "spinodal_I_dt0.01.csv";
  const std::string first = slurp(out / "spinodal" / name), second = slurp(out / "rerun" / name);
  c.add("csv", r.ok && !first.empty() && first == second,
        fmt::format("{} bytes, {}", first.size(), first == second ? "identical" : "different"));
  return c;
}

Criterion projection_criterion(const Runs& runs) {
  Criterion c{6, "projection quality"};
  double worst = 0.0;
  std::string where;
  for (const auto& [label, ratio] : runs.div_ratios)
    if (ratio >= worst) {
      worst = ratio;
      where = label;
    }
  c.add("div", worst <= 10.0 && !runs.div_ratios.empty(),
        fmt::format("max ||div v||_inf / tol {:.2e} over {} runs ({})", worst, runs.div_ratios.size(), where));
  return c;
}

std::set<std::string> split_ids(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string id;
  while (std::getline(ss, id, ','))
    if (!id.empty()) out.insert(id);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string expect_fail, out = "acceptance_out";
  std::string only;
  app.add_option("--expect-fail", expect_fail, "comma list of sub-check ids known to fail");
  app.add_option("--out", out, "directory for run outputs and the report");
  app.add_option("--only", only, "comma list of criterion numbers to run");
  CLI11_PARSE(app, argc, argv);

  const std::set<std::string> expected = split_ids(expect_fail);
  const std::set<std::string> selected = split_ids(only);
  auto want = [&](int k) { return selected.empty() || selected.count(std::to_string(k)) > 0; };

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  std::ofstream report(out_dir / "report.txt");

  Runs runs;
  std::vector<Criterion> results;
  auto timed = [&](int number, auto&& fn) {
    const auto t0 = Clock::now();
    try {
      Criterion c = fn();
      c.seconds = seconds_since(t0);
      results.push_back(std::move(c));
    } catch (const std::exception& e) {
      Criterion c(number, "aborted");
      c.add("run", false, e.what());
      c.seconds = seconds_since(t0);
      results.push_back(std::move(c));
    }
  };

  const auto t_spin = Clock::now();
  if (want(1) || want(2) || want(3) || want(6) || want(9)) run_spinodals(runs, out_dir);
  const double spin_secs = seconds_since(t_spin);
  if (want(1)) results.push_back(energy_criterion(runs, 1, false));
  if (want(2)) results.push_back(energy_criterion(runs, 2, true));
  if (want(3)) results.push_back(mass_criterion(runs));
  for (auto& c : results) c.seconds = spin_secs;
  if (want(4)) timed(4, [&] { return temporal_criterion(runs, report); });
  if (want(5)) timed(5, [&] { return spatial_criterion(runs, report); });
  if (want(7)) timed(7, [&] { return boussinesq_criterion(runs, out_dir, report); });
  if (want(8)) timed(8, [&] { return oracle_criterion(); });
  if (want(9)) timed(9, [&] { return determinism_criterion(runs, out_dir); });
  if (want(6)) results.push_back(projection_criterion(runs));
  std::sort(results.begin(), results.end(), [](const Criterion& a, const Criterion& b) { return a.number < b.number; });

  std::set<std::string> failing;
  for (const Criterion& c : results) {
    std::vector<std::string> failed;
    std::string details;
    for (const Check& k : c.checks) {
      fmt::print(report, "{} {} {}\n", k.id, k.pass ? "PASS" : "FAIL", k.detail);
      if (!k.pass) {
        failing.insert(k.id);
        failed.push_back(expected.count(k.id) ? k.id + " (expected)" : k.id);
      }
    }
    const Check* shown = &c.checks.front();
    for (const Check& k : c.checks)
      if (!k.pass) {
        shown = &k;
        break;
      }
    fmt::print("{} {}. {} [{:.0f} s]: {}{}\n", c.pass() ? "PASS" : "FAIL", c.number, c.title, c.seconds,
               shown->detail, failed.empty() ? "" : fmt::format("; failing: {}", fmt::join(failed, ", ")));
  }

  std::vector<std::string> unexpected, recovered;
  for (const auto& id : failing)
    if (!expected.count(id)) unexpected.push_back(id);
  for (const auto& id : expected) {
    const int number = std::stoi(id.substr(0, id.find('.')));
    if (want(number) && !failing.count(id)) recovered.push_back(id);
  }
  const bool ok = unexpected.empty() && recovered.empty();
  fmt::print("acceptance: {} of {} criteria pass; unexpected failures: [{}]; expected failures that passed: [{}]\n",
             std::count_if(results.begin(), results.end(), [](const Criterion& c) { return c.pass(); }),
             results.size(), fmt::join(unexpected, ", "), fmt::join(recovered, ", "));
  fmt::print("details: {}\n", (out_dir / "report.txt").string());
  return ok ? 0 : 1;
}
