#include "larche/dct.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace larche {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Buffer {
  double* p = nullptr;
  explicit Buffer(std::size_t n) : p(static_cast<double*>(fftw_malloc(sizeof(double) * n))) {
    if (!p) throw std::bad_alloc();
  }
  ~Buffer() { fftw_free(p); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
};

std::vector<double> second_difference_eigs(int n, double h, bool neumann) {
  std::vector<double> e(n);
  for (int k = 0; k < n; ++k) {
    const double theta = neumann ? std::numbers::pi * k / (n - 1) : std::numbers::pi * (k + 1) / (n + 1);
    e[k] = (2.0 - 2.0 * std::cos(theta)) / (h * h);
  }
  return e;
}

}  // namespace

struct NeumannSpectral::Plan {
  std::size_t n;
  Buffer buf;
  fftw_plan plan;
  double norm;
  std::mutex exec;
  Plan(int nx, int ny) : n(static_cast<std::size_t>(nx) * ny), buf(n) {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_r2r_2d(ny, nx, buf.p, buf.p, FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("NeumannSpectral: FFTW plan creation failed");
    norm = 1.0 / (4.0 * (nx - 1) * (ny - 1));
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  void run(const double* in, double* out, double scale) {
    std::lock_guard lock(exec);
    std::copy(in, in + n, buf.p);
    fftw_execute(plan);
    for (std::size_t k = 0; k < n; ++k) out[k] = scale * buf.p[k];
  }
};

NeumannSpectral::NeumannSpectral(const Grid2D& g) : grid_(g), lambda_(g.size()) {
  lx_ = second_difference_eigs(g.nx(), g.hx(), true);
  ly_ = second_difference_eigs(g.ny(), g.hy(), true);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) lambda_[g.index(i, j)] = lx_[i] + ly_[j];
  plan_ = std::make_unique<Plan>(g.nx(), g.ny());
}

NeumannSpectral::~NeumannSpectral() = default;

void NeumannSpectral::forward(const double* in, double* out) const { plan_->run(in, out, 1.0); }

void NeumannSpectral::inverse(const double* in, double* out) const { plan_->run(in, out, plan_->norm); }

void NeumannSpectral::solve_poisson(const double* b, double* x) const {
  const std::size_t n = grid_.size();
  std::vector<double> hat(n);
  forward(b, hat.data());
  hat[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) hat[k] /= lambda_[k];
  inverse(hat.data(), x);
  // The DCT-I zero mode is the trapezoid-weighted mean, so x has zero weighted mean.
}

struct DirichletSpectral::Plan {
  std::size_t n;
  Buffer buf;
  fftw_plan plan;
  double norm;
  std::mutex exec;
  Plan(int nx, int ny) : n(static_cast<std::size_t>(nx) * ny), buf(n) {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_r2r_2d(ny, nx, buf.p, buf.p, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("DirichletSpectral: FFTW plan creation failed");
    norm = 1.0 / (4.0 * (nx + 1) * (ny + 1));
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
};

DirichletSpectral::DirichletSpectral(int nx_interior, int ny_interior, double hx, double hy)
    : nx_(nx_interior), ny_(ny_interior) {
  if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("DirichletSpectral: empty interior");
  lx_ = second_difference_eigs(nx_, hx, false);
  ly_ = second_difference_eigs(ny_, hy, false);
  plan_ = std::make_unique<Plan>(nx_, ny_);
}

DirichletSpectral::~DirichletSpectral() = default;

void DirichletSpectral::solve(double ax, double ay, double scale, const double* b, double* x) const {
  std::lock_guard lock(plan_->exec);
  double* w = plan_->buf.p;
  std::copy(b, b + plan_->n, w);
  fftw_execute(plan_->plan);
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) w[j * nx_ + i] /= scale * (ax * lx_[i] + ay * ly_[j]);
  fftw_execute(plan_->plan);
  for (std::size_t k = 0; k < plan_->n; ++k) x[k] = plan_->norm * w[k];
}

}  // namespace larche
