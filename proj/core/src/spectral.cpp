#include "chmhd/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace chmhd {

namespace {

// FFTW planning and plan destruction are not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct AxisInfo {
  int m;
  fftw_r2r_kind fwd;
  fftw_r2r_kind inv;
  double norm;
  std::vector<double> eig;
};

AxisInfo axis_info(int n, double h, SpectralAxis kind) {
  AxisInfo a{};
  const double pi = std::numbers::pi;
  const double h2 = h * h;
  switch (kind) {
    case SpectralAxis::neumann_cell:
      a = {n, FFTW_REDFT10, FFTW_REDFT01, 2.0 * n, {}};
      for (int k = 0; k < n; ++k) a.eig.push_back((2.0 - 2.0 * std::cos(pi * k / n)) / h2);
      break;
    case SpectralAxis::dirichlet_cell:
      a = {n, FFTW_RODFT10, FFTW_RODFT01, 2.0 * n, {}};
      for (int k = 0; k < n; ++k) a.eig.push_back((2.0 - 2.0 * std::cos(pi * (k + 1) / n)) / h2);
      break;
    case SpectralAxis::dirichlet_node:
      a = {n - 1, FFTW_RODFT00, FFTW_RODFT00, 2.0 * n, {}};
      for (int k = 0; k < n - 1; ++k) a.eig.push_back((2.0 - 2.0 * std::cos(pi * (k + 1) / n)) / h2);
      break;
    case SpectralAxis::periodic:
      a = {n, FFTW_R2HC, FFTW_HC2R, static_cast<double>(n), {}};
      for (int k = 0; k < n; ++k) {
        const int f = std::min(k, n - k);
        a.eig.push_back((2.0 - 2.0 * std::cos(2.0 * pi * f / n)) / h2);
      }
      break;
  }
  return a;
}

}  // namespace

struct SpectralBasis::Plans {
  double* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Plans() {
    const std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (buf) fftw_free(buf);
  }
};

SpectralBasis::SpectralBasis(int nx, double dx, SpectralAxis ax, int ny, double dy, SpectralAxis ay)
    : plans_(std::make_unique<Plans>()) {
  const AxisInfo ix = axis_info(nx, dx, ax);
  const AxisInfo iy = axis_info(ny, dy, ay);
  if (ix.m < 1 || iy.m < 1) throw std::invalid_argument("spectral basis: empty axis");
  mx_ = ix.m;
  my_ = iy.m;
  norm_ = ix.norm * iy.norm;
  eigen_.resize(size());
  for (int j = 0; j < my_; ++j)
    for (int i = 0; i < mx_; ++i) eigen_[static_cast<std::size_t>(j) * mx_ + i] = ix.eig[i] + iy.eig[j];

  const std::lock_guard lock(planner_mutex());
  plans_->buf = fftw_alloc_real(size());
  plans_->fwd = fftw_plan_r2r_2d(my_, mx_, plans_->buf, plans_->buf, iy.fwd, ix.fwd, FFTW_ESTIMATE);
  plans_->inv = fftw_plan_r2r_2d(my_, mx_, plans_->buf, plans_->buf, iy.inv, ix.inv, FFTW_ESTIMATE);
  if (!plans_->fwd || !plans_->inv) throw std::runtime_error("spectral basis: FFTW planning failed");
}

SpectralBasis::~SpectralBasis() = default;

void SpectralBasis::forward(std::span<const double> in, std::span<double> out) const {
  std::copy(in.begin(), in.end(), plans_->buf);
  fftw_execute(plans_->fwd);
  std::copy(plans_->buf, plans_->buf + size(), out.begin());
}

void SpectralBasis::inverse(std::span<const double> in, std::span<double> out) const {
  std::copy(in.begin(), in.end(), plans_->buf);
  fftw_execute(plans_->inv);
  const double s = 1.0 / norm_;
  for (std::size_t k = 0; k < size(); ++k) out[k] = plans_->buf[k] * s;
}

void SpectralBasis::solve_helmholtz(double a, double b, std::span<const double> in, std::span<double> out) const {
  if (in.size() != size() || out.size() != size()) throw std::invalid_argument("spectral solve: size mismatch");
  std::copy(in.begin(), in.end(), plans_->buf);
  fftw_execute(plans_->fwd);
  const double s = 1.0 / norm_;
  for (std::size_t k = 0; k < size(); ++k) {
    const double sym = a + b * eigen_[k];
    plans_->buf[k] = sym != 0.0 ? plans_->buf[k] * s / sym : 0.0;
  }
  fftw_execute(plans_->inv);
  std::copy(plans_->buf, plans_->buf + size(), out.begin());
}

}  // namespace chmhd
