#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "chmhd/harness.hpp"
#include "chmhd/linalg.hpp"
#include "chmhd/operators.hpp"
#include "chmhd/schemes.hpp"

namespace {

using namespace chmhd;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

Field smooth_cell_field(const GridSpec& g) {
  Field f(g, Location::cell);
  f.sample([](double x, double y) { return std::cos(3.0 * x) * std::sin(2.0 * y); });
  apply_boundary(f, BoundaryRule::neumann(), 0.0);
  return f;
}

void BM_Spmv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StencilContext ctx(GridSpec(n, n), BoundaryRule::neumann(), VelocityRule::no_slip());
  const CsrMatrix& a = ctx.laplacian();
  const std::vector<double> x = random_vector(a.cols, 1);
  std::vector<double> y(a.rows);
  for (auto _ : state) {
    spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a.nnz()));
}
BENCHMARK(BM_Spmv)->Arg(64)->Arg(128)->Arg(256);

void BM_SolveShiftedLaplacian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Method method = state.range(1) == 0 ? Method::cg : Method::bicgstab;
  const StencilContext ctx(GridSpec(n, n), BoundaryRule::neumann(), VelocityRule::no_slip());
  const CsrMatrix a = add(identity(ctx.layout().cells()), ctx.laplacian(), 1.0, -1e-3);
  const std::vector<double> rhs = random_vector(a.rows, 2);
  const Preconditioner pc = jacobi(a);
  SolverConfig cfg;
  cfg.method = method;
  int iters = 0;
  for (auto _ : state) {
    std::vector<double> x(a.rows, 0.0);
    const SolveReport rep = solve(a, rhs, x, cfg, pc);
    if (!rep.converged) state.SkipWithError("solve did not converge");
    iters = rep.iterations;
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["iterations"] = iters;
}
BENCHMARK(BM_SolveShiftedLaplacian)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_PressurePoisson(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StencilContext ctx(GridSpec(n, n), BoundaryRule::neumann(), VelocityRule::no_slip());
  const CsrMatrix a = add(identity(ctx.layout().cells()), ctx.pressure_laplacian(), 0.0, -1.0);
  std::vector<double> rhs = random_vector(a.rows, 3);
  double mean = 0.0;
  for (double r : rhs) mean += r;
  mean /= static_cast<double>(rhs.size());
  for (double& r : rhs) r -= mean;
  SolverConfig cfg{.method = Method::cg, .nullspace = Nullspace::constants};
  const Preconditioner pc = jacobi(a);
  int iters = 0;
  for (auto _ : state) {
    std::vector<double> x(a.rows, 0.0);
    const SolveReport rep = solve(a, rhs, x, cfg, pc);
    if (!rep.converged) state.SkipWithError("pressure solve did not converge");
    iters = rep.iterations;
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["iterations"] = iters;
}
BENCHMARK(BM_PressurePoisson)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_LaplacianStencil(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Field f = smooth_cell_field(GridSpec(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_LaplacianStencil)->Arg(128)->Arg(256);

void BM_GradDiv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridSpec g(n, n);
  const Field f = smooth_cell_field(g);
  for (auto _ : state) {
    VectorField gf = grad_to_faces(f);
    apply_boundary(gf, VelocityRule::no_slip());
    benchmark::DoNotOptimize(div_from_faces(gf));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GradDiv)->Arg(128)->Arg(256);

void BM_Advance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Problem prob;
  prob.grid = GridSpec(n, n);
  prob.params.eps = 0.05;
  prob.params.lambda = 0.1;
  prob.params.mobility = 0.1;
  prob.scheme.scheme = static_cast<Scheme>(state.range(1));
  prob.scheme.dt = 1e-3;
  prob.scheme.S_prime = 1.0 / prob.params.eps;
  const Integrator integ(prob);
  const GridSpec& g = prob.grid;
  const State s0 = integ.initial_state(spinodal_initial_phase(g, 0.0, 0.1, 7), VectorField::mac(g),
                                       Field(g, Location::cell), VectorField::cell(g));
  for (auto _ : state) benchmark::DoNotOptimize(integ.advance(s0));
}
BENCHMARK(BM_Advance)->ArgsProduct({{32, 64}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
