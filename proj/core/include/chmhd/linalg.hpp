#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chmhd {

/// Compressed sparse row matrix. Columns are sorted and unique within a row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return val.size(); }
  bool square() const noexcept { return rows == cols; }

  /// Entry (i, j), zero when not stored.
  double at(int i, int j) const;

  /// Throws std::logic_error when the structural invariants are broken.
  void check() const;
};

/// Triplet accumulator; duplicate entries are summed on build().
class CsrBuilder {
 public:
  CsrBuilder(int rows, int cols);

  void add(int i, int j, double v);
  CsrMatrix build(bool drop_zeros = false) const;

 private:
  struct Entry {
    int i;
    int j;
    double v;
  };
  int rows_;
  int cols_;
  std::vector<Entry> entries_;
};

CsrMatrix identity(int n, double scale = 1.0);
CsrMatrix diagonal_matrix(std::span<const double> d);
CsrMatrix transpose(const CsrMatrix& a);
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);
/// alpha*A + beta*B
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);
/// diag(d) * A
CsrMatrix scale_rows(const CsrMatrix& a, std::span<const double> d);
std::vector<double> diagonal(const CsrMatrix& a);
std::vector<double> to_dense(const CsrMatrix& a);

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

enum class Method { cg, bicgstab };
enum class Nullspace { none, constants };

struct SolverConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  /// Zero selects 10*sqrt(n).
  int max_iter = 0;
  Method method = Method::bicgstab;
  Nullspace nullspace = Nullspace::none;
  /// Restarts allowed after a BiCGStab breakdown.
  int max_restarts = 3;

  void validate() const;
  int iteration_limit(std::size_t n) const;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  double threshold = 0.0;
  bool converged = false;
  int restarts = 0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveReport report)
      : std::runtime_error(what), report_(report) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

/// z = M^{-1} r
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;
/// y = A x
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

Preconditioner jacobi(const CsrMatrix& a);

/// Preconditioned conjugate gradients. `x` holds the initial guess on entry.
SolveReport cg(const LinearOperator& a, std::span<const double> rhs, std::span<double> x,
               const SolverConfig& cfg, const Preconditioner& precond = {});

/// Right-preconditioned BiCGStab. `x` holds the initial guess on entry.
SolveReport bicgstab(const LinearOperator& a, std::span<const double> rhs, std::span<double> x,
                     const SolverConfig& cfg, const Preconditioner& precond = {});

LinearOperator as_operator(const CsrMatrix& a);

/// Dispatch on cfg.method. Throws SolverError when the iteration limit is hit;
/// a breakdown that survives all restarts returns converged = false.
SolveReport solve(const CsrMatrix& a, std::span<const double> rhs, std::span<double> x,
                  const SolverConfig& cfg, const Preconditioner& precond = {});
SolveReport solve(const LinearOperator& a, std::span<const double> rhs, std::span<double> x,
                  const SolverConfig& cfg, const Preconditioner& precond = {});

std::pair<std::vector<double>, SolveReport> solve(const CsrMatrix& a, std::span<const double> rhs,
                                                  const SolverConfig& cfg);

/// Dense LU with partial pivoting, for small oracle systems. `a` is row-major n*n.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b);

}  // namespace chmhd
