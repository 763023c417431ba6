#include "chmhd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chmhd {

double CsrMatrix::at(int i, int j) const {
  const auto first = col.begin() + ptr[i];
  const auto last = col.begin() + ptr[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

void CsrMatrix::check() const {
  if (rows < 0 || cols < 0) throw std::logic_error("csr: negative dimension");
  if (ptr.size() != static_cast<std::size_t>(rows) + 1) throw std::logic_error("csr: bad row pointer size");
  if (ptr.front() != 0 || static_cast<std::size_t>(ptr.back()) != val.size() || col.size() != val.size())
    throw std::logic_error("csr: last offset must equal nnz");
  for (int i = 0; i < rows; ++i) {
    if (ptr[i] > ptr[i + 1]) throw std::logic_error("csr: row offsets not monotone");
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) {
      if (col[k] < 0 || col[k] >= cols) throw std::logic_error("csr: column out of range");
      if (k > ptr[i] && col[k] <= col[k - 1]) throw std::logic_error("csr: columns unsorted or duplicated");
    }
  }
}

CsrBuilder::CsrBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}

void CsrBuilder::add(int i, int j, double v) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("csr builder: index out of range");
  entries_.push_back({i, j, v});
}

CsrMatrix CsrBuilder::build(bool drop_zeros) const {
  std::vector<Entry> e = entries_;
  std::stable_sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  CsrMatrix m;
  m.rows = rows_;
  m.cols = cols_;
  m.ptr.assign(static_cast<std::size_t>(rows_) + 1, 0);
  for (std::size_t k = 0; k < e.size();) {
    std::size_t l = k;
    double sum = 0.0;
    while (l < e.size() && e[l].i == e[k].i && e[l].j == e[k].j) sum += e[l++].v;
    if (!(drop_zeros && sum == 0.0)) {
      m.col.push_back(e[k].j);
      m.val.push_back(sum);
      ++m.ptr[e[k].i + 1];
    }
    k = l;
  }
  std::partial_sum(m.ptr.begin(), m.ptr.end(), m.ptr.begin());
  return m;
}

CsrMatrix identity(int n, double scale) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.ptr.resize(static_cast<std::size_t>(n) + 1);
  std::iota(m.ptr.begin(), m.ptr.end(), 0);
  m.col.resize(n);
  std::iota(m.col.begin(), m.col.end(), 0);
  m.val.assign(n, scale);
  return m;
}

CsrMatrix diagonal_matrix(std::span<const double> d) {
  CsrMatrix m = identity(static_cast<int>(d.size()));
  std::copy(d.begin(), d.end(), m.val.begin());
  return m;
}

CsrMatrix transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.ptr.assign(static_cast<std::size_t>(a.cols) + 1, 0);
  for (int c : a.col) ++t.ptr[c + 1];
  std::partial_sum(t.ptr.begin(), t.ptr.end(), t.ptr.begin());
  t.col.resize(a.nnz());
  t.val.resize(a.nnz());
  std::vector<int> next(t.ptr.begin(), t.ptr.end() - 1);
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k) {
      const int dst = next[a.col[k]]++;
      t.col[dst] = i;
      t.val[dst] = a.val[k];
    }
  return t;
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("multiply: inner dimensions differ");
  CsrMatrix c;
  c.rows = a.rows;
  c.cols = b.cols;
  c.ptr.assign(static_cast<std::size_t>(a.rows) + 1, 0);
  std::vector<int> marker(b.cols, -1);
  std::vector<double> acc(b.cols, 0.0);
  std::vector<int> row_cols;
  for (int i = 0; i < a.rows; ++i) {
    row_cols.clear();
    for (int ka = a.ptr[i]; ka < a.ptr[i + 1]; ++ka) {
      const int k = a.col[ka];
      const double av = a.val[ka];
      for (int kb = b.ptr[k]; kb < b.ptr[k + 1]; ++kb) {
        const int j = b.col[kb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          row_cols.push_back(j);
        }
        acc[j] += av * b.val[kb];
      }
    }
    std::sort(row_cols.begin(), row_cols.end());
    for (int j : row_cols) {
      c.col.push_back(j);
      c.val.push_back(acc[j]);
    }
    c.ptr[i + 1] = static_cast<int>(c.col.size());
  }
  return c;
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("add: shapes differ");
  CsrMatrix c;
  c.rows = a.rows;
  c.cols = a.cols;
  c.ptr.assign(static_cast<std::size_t>(a.rows) + 1, 0);
  for (int i = 0; i < a.rows; ++i) {
    int ka = a.ptr[i], kb = b.ptr[i];
    const int ea = a.ptr[i + 1], eb = b.ptr[i + 1];
    while (ka < ea || kb < eb) {
      if (kb >= eb || (ka < ea && a.col[ka] < b.col[kb])) {
        c.col.push_back(a.col[ka]);
        c.val.push_back(alpha * a.val[ka++]);
      } else if (ka >= ea || b.col[kb] < a.col[ka]) {
        c.col.push_back(b.col[kb]);
        c.val.push_back(beta * b.val[kb++]);
      } else {
        c.col.push_back(a.col[ka]);
        c.val.push_back(alpha * a.val[ka++] + beta * b.val[kb++]);
      }
    }
    c.ptr[i + 1] = static_cast<int>(c.col.size());
  }
  return c;
}

CsrMatrix scale_rows(const CsrMatrix& a, std::span<const double> d) {
  if (d.size() != static_cast<std::size_t>(a.rows)) throw std::invalid_argument("scale_rows: size mismatch");
  CsrMatrix c = a;
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k) c.val[k] *= d[i];
  return c;
}

std::vector<double> diagonal(const CsrMatrix& a) {
  std::vector<double> d(std::min(a.rows, a.cols), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.at(static_cast<int>(i), static_cast<int>(i));
  return d;
}

std::vector<double> to_dense(const CsrMatrix& a) {
  std::vector<double> d(static_cast<std::size_t>(a.rows) * a.cols, 0.0);
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k)
      d[static_cast<std::size_t>(i) * a.cols + a.col[k]] += a.val[k];
  return d;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != static_cast<std::size_t>(a.cols) || y.size() != static_cast<std::size_t>(a.rows))
    throw std::invalid_argument("spmv: dimension mismatch");
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows);
  spmv(a, x, y);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void SolverConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("solver tolerances must be positive");
  if (max_iter < 0) throw std::invalid_argument("solver max_iter must be nonnegative");
}

int SolverConfig::iteration_limit(std::size_t n) const {
  if (max_iter > 0) return max_iter;
  return std::max(1, static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(n)))));
}

Preconditioner jacobi(const CsrMatrix& a) {
  std::vector<double> inv = diagonal(a);
  for (double& d : inv) {
    if (d == 0.0) throw std::invalid_argument("jacobi: zero diagonal entry");
    d = 1.0 / d;
  }
  return [inv = std::move(inv)](std::span<const double> r, std::span<double> z) {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv[i] * r[i];
  };
}

LinearOperator as_operator(const CsrMatrix& a) {
  return [&a](std::span<const double> x, std::span<double> y) { spmv(a, x, y); };
}

namespace {

void remove_mean(std::span<double> v) {
  if (v.empty()) return;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

void apply_precond(const Preconditioner& m, std::span<const double> r, std::span<double> z) {
  if (m)
    m(r, z);
  else
    std::copy(r.begin(), r.end(), z.begin());
}

}  // namespace

SolveReport cg(const LinearOperator& a, std::span<const double> rhs, std::span<double> x,
               const SolverConfig& cfg, const Preconditioner& precond) {
  cfg.validate();
  const std::size_t n = rhs.size();
  const bool project = cfg.nullspace == Nullspace::constants;
  std::vector<double> b(rhs.begin(), rhs.end());
  if (project) {
    remove_mean(b);
    remove_mean(x);
  }
  SolveReport rep;
  rep.threshold = std::max(cfg.rel_tol * norm2(b), cfg.abs_tol);
  std::vector<double> r(n), z(n), p(n), q(n);
  a(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (project) remove_mean(r);
  rep.residual = norm2(r);
  const int limit = cfg.iteration_limit(n);
  if (rep.residual <= rep.threshold) {
    rep.converged = true;
    return rep;
  }
  apply_precond(precond, r, z);
  if (project) remove_mean(z);
  p = z;
  double rz = dot(r, z);
  while (rep.iterations < limit) {
    a(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0 || !std::isfinite(pq)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (project) remove_mean(r);
    ++rep.iterations;
    rep.residual = norm2(r);
    if (rep.residual <= rep.threshold) {
      rep.converged = true;
      break;
    }
    apply_precond(precond, r, z);
    if (project) remove_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (project) remove_mean(x);
  return rep;
}

SolveReport bicgstab(const LinearOperator& a, std::span<const double> rhs, std::span<double> x,
                     const SolverConfig& cfg, const Preconditioner& precond) {
  cfg.validate();
  const std::size_t n = rhs.size();
  const bool project = cfg.nullspace == Nullspace::constants;
  std::vector<double> b(rhs.begin(), rhs.end());
  if (project) {
    remove_mean(b);
    remove_mean(x);
  }
  SolveReport rep;
  rep.threshold = std::max(cfg.rel_tol * norm2(b), cfg.abs_tol);
  const int limit = cfg.iteration_limit(n);
  std::vector<double> r(n), r0(n), p(n), v(n), s(n), t(n), ph(n), sh(n);
  constexpr double tiny = 1e-300;

  for (;;) {
    a(x, t);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
    if (project) remove_mean(r);
    rep.residual = norm2(r);
    if (rep.residual <= rep.threshold) {
      rep.converged = true;
      break;
    }
    r0 = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    bool breakdown = false;
    while (rep.iterations < limit) {
      const double rho_new = dot(r0, r);
      if (std::abs(rho_new) < tiny || std::abs(omega) < tiny) {
        breakdown = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      apply_precond(precond, p, ph);
      if (project) remove_mean(ph);
      a(ph, v);
      const double r0v = dot(r0, v);
      if (std::abs(r0v) < tiny) {
        breakdown = true;
        break;
      }
      alpha = rho / r0v;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++rep.iterations;
      if (norm2(s) <= rep.threshold) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
        r = s;
        if (project) remove_mean(r);
        rep.residual = norm2(r);
        rep.converged = true;
        break;
      }
      apply_precond(precond, s, sh);
      if (project) remove_mean(sh);
      a(sh, t);
      const double tt = dot(t, t);
      if (tt < tiny) {
        breakdown = true;
        break;
      }
      omega = dot(t, s) / tt;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * ph[i] + omega * sh[i];
        r[i] = s[i] - omega * t[i];
      }
      if (project) remove_mean(r);
      rep.residual = norm2(r);
      if (!std::isfinite(rep.residual)) {
        breakdown = true;
        break;
      }
      if (rep.residual <= rep.threshold) {
        rep.converged = true;
        break;
      }
    }
    if (rep.converged || !breakdown || rep.restarts >= cfg.max_restarts) break;
    ++rep.restarts;
  }
  if (project) remove_mean(x);
  return rep;
}

SolveReport solve(const LinearOperator& a, std::span<const double> rhs, std::span<double> x,
                  const SolverConfig& cfg, const Preconditioner& precond) {
  if (x.size() != rhs.size()) throw std::invalid_argument("solve: dimension mismatch");
  SolveReport rep = cfg.method == Method::cg ? cg(a, rhs, x, cfg, precond) : bicgstab(a, rhs, x, cfg, precond);
  if (!rep.converged && rep.iterations >= cfg.iteration_limit(rhs.size()))
    throw SolverError("linear solve did not converge within " + std::to_string(rep.iterations) +
                          " iterations (residual " + std::to_string(rep.residual) + ")",
                      rep);
  return rep;
}

SolveReport solve(const CsrMatrix& a, std::span<const double> rhs, std::span<double> x,
                  const SolverConfig& cfg, const Preconditioner& precond) {
  if (!a.square()) throw std::invalid_argument("solve: matrix is not square");
  if (rhs.size() != static_cast<std::size_t>(a.rows)) throw std::invalid_argument("solve: dimension mismatch");
  return solve(as_operator(a), rhs, x, cfg, precond);
}

std::pair<std::vector<double>, SolveReport> solve(const CsrMatrix& a, std::span<const double> rhs,
                                                  const SolverConfig& cfg) {
  std::vector<double> x(rhs.size(), 0.0);
  SolveReport rep = solve(a, rhs, x, cfg);
  return {std::move(x), rep};
}

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("dense_solve: size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (a[piv * n + k] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii * n + j] * x[j];
    x[ii] = s / a[ii * n + ii];
  }
  return x;
}

}  // namespace chmhd
