#include "larche/phasefield.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "larche/kernels.hpp"

namespace larche {
namespace {

double smooth_step_psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }


void nodal_f(const DoubleWell& w, const Field& c, double scale, Field& out) {
  const auto& a = w.derivative_coefficients(1);
  kernels::active().poly_eval(c.data(), out.data(), c.size(), a.data(), static_cast<int>(a.size()), scale);
}

void check_state(const Field& c) {
  for (double v : c.values()) {
    if (!std::isfinite(v)) throw std::runtime_error("phasefield: non-finite concentration");
    if (std::abs(v) > 1.5) throw std::runtime_error("phasefield: |c| exceeded 1.5 (blow-up)");
  }
}

}  // namespace

void PFConfig::validate(const Grid2D& g) const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("PFConfig: epsilon must be positive");
  if (tau < 0.0 || !(tau_factor > 0.0)) throw std::invalid_argument("PFConfig: time step must be positive");
  if (!(stabilization >= 0.0)) throw std::invalid_argument("PFConfig: stabilization must be >= 0");
  if (!(cg_tol > 0.0 && cg_tol < 1e-2)) throw std::invalid_argument("PFConfig: cg_tol must be in (0, 1e-2)");
  if (!(end_time >= 0.0)) throw std::invalid_argument("PFConfig: end_time must be >= 0");
  if (g.nx() < 32 || g.ny() < 32) throw std::invalid_argument("PFConfig: grid needs at least 32 nodes per direction");
  if (epsilon < 2.0 * g.h_max())
    throw std::invalid_argument("PFConfig: epsilon must be >= 2 h_max (resolution rule)");
}

double cutoff(double z) {
  const double a = std::abs(z);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double p = smooth_step_psi(2.0 - a), q = smooth_step_psi(a - 1.0);
  return p / (p + q);
}

double glued_value(const SdfSample& s, double epsilon, double delta, const ProfileTable& theta0,
                   const ProfileTable& theta1, bool first_order) {
  const double z = s.d / epsilon;
  const double zeta = cutoff(s.d / delta);
  const double side = s.d >= 0.0 ? 1.0 : -1.0;
  double inner = theta0.at(z);
  double outer = side;
  if (first_order) {
    const double p = s.curvature;
    inner += epsilon * p * theta1.at(z);
    outer += epsilon * p * (side > 0 ? theta1.limit_plus : theta1.limit_minus);
  }
  return zeta * inner + (1.0 - zeta) * outer;
}

Field init_glued(const Grid2D& g, const SignedDistanceMap& dist, double epsilon, double delta,
                 const ProfileTable& theta0, const ProfileTable& theta1, bool first_order) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("init_glued: epsilon must be positive");
  if (delta < 4.0 * epsilon * (1.0 - 1e-12)) throw std::invalid_argument("init_glued: delta must be >= 4 epsilon");
  Field c(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 x = g.node(i, j);
      const bool boundary = i == 0 || j == 0 || i == g.nx() - 1 || j == g.ny() - 1;
      const SdfSample s = dist.eval(x);
      if (boundary && std::abs(s.d) <= 2.0 * delta)
        throw std::invalid_argument("init_glued: interface closer than 2 delta to the boundary");
      c(i, j) = glued_value(s, epsilon, delta, theta0, theta1, first_order);
    }
  }
  return c;
}

Field distance_from_phase(const Field& c, const ProfileTable& theta0, double epsilon) {
  Field d(c.grid());
  for (std::size_t k = 0; k < c.size(); ++k) d[k] = epsilon * theta0.inverse(c[k]);
  return d;
}

Field distance_from_phase(const Field& c, const ProfileTable& theta0, const ProfileTable& theta1, const Field& p,
                          double epsilon) {
  const double Z = std::min(theta0.half_width, theta1.half_width);
  Field d(c.grid());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double a = epsilon * p[k];
    auto g = [&](double z) { return theta0.at(z) + a * theta1.at(z) - c[k]; };
    double lo = -Z, hi = Z;
    double z = theta0.inverse(c[k]);
    if (!(g(lo) < 0.0 && g(hi) > 0.0)) {
      d[k] = epsilon * z;
      continue;
    }
    // Safeguarded Newton on the bracket [lo, hi].
    z = std::clamp(z, lo, hi);
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
      const double r = g(z);
      if (r == 0.0) break;
      (r < 0.0 ? lo : hi) = z;
      const double dr = theta0.d1(z) + a * theta1.d1(z);
      double zn = z - r / dr;
      if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
      if (std::abs(zn - z) < 1e-14) {
        z = zn;
        break;
      }
      z = zn;
    }
    d[k] = epsilon * z;
  }
  return d;
}

namespace {

// Moves each contour point along its normal onto the zero set of the cubic
// interpolant of psi; the marching-squares points carry the O(h^2) error of
// linear edge interpolation.
InterfacePolyline refine_onto_zero_set(InterfacePolyline poly, const Field& psi) {
  const double h = psi.grid().h_max();
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2 nu = poly.normals[k];
    Vec2 x = poly.points[k];
    try {
      for (int it = 0; it < 4; ++it) {
        const double v = bicubic(psi, x);
        const double dv = (bicubic(psi, x + nu * (0.5 * h)) - bicubic(psi, x - nu * (0.5 * h))) / h;
        if (!(dv > 0.0)) break;
        x = x - nu * (v / dv);
      }
    } catch (const std::out_of_range&) {
      continue;
    }
    if ((x - poly.points[k]).norm() < h) poly.points[k] = x;
  }
  return curvature_normals(std::move(poly));
}

}  // namespace

InterfacePolyline interface_from_phase(const Field& c, const ProfileTable& theta0, double epsilon,
                                       const ProfileTable* theta1) {
  const Field psi0 = distance_from_phase(c, theta0, epsilon);
  InterfacePolyline poly = extract_zero_contour(c);
  if (!theta1) return attach_curvature(refine_onto_zero_set(std::move(poly), psi0), level_set_curvature(psi0));
  // Level sets do not depend on the inversion; a constant p only makes the
  // inverted field closer to a distance, which the finite differences like.
  // Nodal or nearest-point p would add tangential noise.
  poly = attach_curvature(std::move(poly), level_set_curvature(psi0));
  double sum = 0.0;
  for (double k : poly.curvature) sum += k;
  const Field p(c.grid(), -sum / static_cast<double>(poly.size()));
  const Field psi1 = distance_from_phase(c, theta0, *theta1, p, epsilon);
  return attach_curvature(refine_onto_zero_set(std::move(poly), psi1), level_set_curvature(psi1));
}

std::vector<double> laplacian_eigenvalues(const NeumannSpectral& sp, LaplacianKind kind) {
  if (kind == LaplacianKind::five_point) return sp.eigenvalues();
  const Grid2D& g = sp.grid();
  std::vector<double> lam(g.size());
  const double ax = std::numbers::pi / g.Lx(), ay = std::numbers::pi / g.Ly();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) lam[g.index(i, j)] = ax * ax * i * i + ay * ay * j * j;
  return lam;
}

namespace {
void spectral_laplacian(const NeumannSpectral& sp, const std::vector<double>& lam, const Field& c, Field& out) {
  std::vector<double> hat(c.size());
  sp.forward(c.data(), hat.data());
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= -lam[k];
  sp.inverse(hat.data(), out.data());
}
}  // namespace

void apply_laplacian(const Field& c, Field& out, LaplacianKind kind) {
  const Grid2D& g = c.grid();
  if (kind == LaplacianKind::five_point) {
    kernels::active().laplacian_neumann(c.data(), out.data(), g.nx(), g.ny(), 1.0 / (g.hx() * g.hx()),
                                        1.0 / (g.hy() * g.hy()));
    return;
  }
  const NeumannSpectral sp(g);
  spectral_laplacian(sp, laplacian_eigenvalues(sp, kind), c, out);
}

double dirichlet_energy(const Field& c, LaplacianKind kind) {
  const Grid2D& g = c.grid();
  if (kind != LaplacianKind::five_point) {
    Field lap(g);
    apply_laplacian(c, lap, kind);
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) s -= g.node_weight(i, j) * c(i, j) * lap(i, j);
    return 0.5 * s;
  }
  const int nx = g.nx(), ny = g.ny();
  const double hx = g.hx(), hy = g.hy();
  double sx = 0.0, sy = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = c(i + 1, j) - c(i, j);
      sx += wy * d * d;
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
      const double d = c(i, j + 1) - c(i, j);
      sy += wx * d * d;
    }
  }
  return 0.5 * (sx * hy / hx + sy * hx / hy);
}

CahnLarcheStepper::CahnLarcheStepper(const Grid2D& g, PFConfig cfg, DoubleWell potential)
    : grid_(g), cfg_(std::move(cfg)), potential_(std::move(potential)), spectral_(g) {
  cfg_.validate(g);
  if (cfg_.elasticity) elastic_ = std::make_unique<ElasticSolver>(g, cfg_.elasticity->C, cfg_.elasticity->E);
  work_a_.resize(g.size());
  work_b_.resize(g.size());
  work_c_.resize(g.size());
  lambda_ = laplacian_eigenvalues(spectral_, cfg_.laplacian);
  set_tau(cfg_.time_step());
}

CahnLarcheStepper::~CahnLarcheStepper() = default;

void CahnLarcheStepper::set_tau(double tau) {
  tau_ = tau;
  const double eps = cfg_.epsilon, s = cfg_.stabilization;
  num_.resize(grid_.size());
  den_.resize(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const double l = lambda_[k];
    const double d = 1.0 + tau * eps * l * l + tau * l * s / eps;
    num_[k] = -tau * eps * l * l / d;  // multiplies c_k
    den_[k] = -tau * l / d;            // multiplies g_k
  }
}

void CahnLarcheStepper::laplacian(const Field& c, Field& out) const {
  if (cfg_.laplacian == LaplacianKind::five_point)
    apply_laplacian(c, out, cfg_.laplacian);
  else
    spectral_laplacian(spectral_, lambda_, c, out);
}

VectorField CahnLarcheStepper::equilibrate(const Field& c, const VectorField* guess) {
  if (!elastic_) return VectorField(grid_);
  VectorField u = elastic_->solve(c, cfg_.cg_tol, nullptr, nullptr, guess);
  last_cg_ = elastic_->last_stats().iterations;
  return u;
}

Field CahnLarcheStepper::elastic_chemical_potential(const PFState& s) const {
  if (!elastic_) return Field(grid_);
  return elastic_->dWdc(s.u, s.c);
}

PFState CahnLarcheStepper::make_state(Field c, double time) {
  if (!(c.grid() == grid_)) throw std::invalid_argument("make_state: grid mismatch");
  check_state(c);
  PFState s;
  s.c = std::move(c);
  s.time = time;
  s.u = equilibrate(s.c);
  Field lap(grid_), fc(grid_);
  laplacian(s.c, lap);
  nodal_f(potential_, s.c, 1.0 / cfg_.epsilon, fc);
  s.mu = Field(grid_);
  const Field wc = elastic_chemical_potential(s);
  for (std::size_t k = 0; k < grid_.size(); ++k) s.mu[k] = -cfg_.epsilon * lap[k] + fc[k] + wc[k];
  return s;
}

void CahnLarcheStepper::step(PFState& st) {
  const auto& K = kernels::active();
  const std::size_t n = grid_.size();
  const double eps = cfg_.epsilon;

  Field g(grid_);
  nodal_f(potential_, st.c, 1.0 / eps, g);
  if (elastic_) {
    const Field wc = elastic_->dWdc(st.u, st.c);
    K.axpy(1.0, wc.data(), g.data(), n);
  }

  double* ch = work_a_.data();
  double* gh = work_b_.data();
  double* dh = work_c_.data();
  spectral_.forward(st.c.data(), ch);
  spectral_.forward(g.data(), gh);
  K.mode_update(num_.data(), ch, den_.data(), gh, dh, n);
  Field delta(grid_);
  spectral_.inverse(dh, delta.data());
  const double m = weighted_mean(delta);
  for (auto& v : delta.values()) v -= m;

  K.axpy(1.0, delta.data(), st.c.data(), n);
  check_state(st.c);

  Field lap(grid_);
  laplacian(st.c, lap);
  // mu = -eps Delta c' + (s/eps) (c' - c) + g
  for (std::size_t k = 0; k < n; ++k) st.mu[k] = -eps * lap[k] + cfg_.stabilization / eps * delta[k] + g[k];
  if (elastic_) {
    st.u = equilibrate(st.c, &st.u);
  }
  st.time += tau_;
}

EnergyParts CahnLarcheStepper::energy(const PFState& s) const {
  EnergyParts e;
  const double eps = cfg_.epsilon;
  double well = 0.0;
  for (int j = 0; j < grid_.ny(); ++j)
    for (int i = 0; i < grid_.nx(); ++i) well += grid_.node_weight(i, j) * potential_.F(s.c(i, j));
  double grad = 0.0;
  if (cfg_.laplacian == LaplacianKind::five_point) {
    grad = dirichlet_energy(s.c);
  } else {
    Field lap(grid_);
    laplacian(s.c, lap);
    for (int j = 0; j < grid_.ny(); ++j)
      for (int i = 0; i < grid_.nx(); ++i) grad -= 0.5 * grid_.node_weight(i, j) * s.c(i, j) * lap(i, j);
  }
  e.E1 = eps * grad + well / eps;
  if (elastic_) e.E2 = elastic_->energy(s.u, s.c);
  return e;
}

Trajectory run(const Grid2D& g, const PFConfig& cfg, const DoubleWell& potential, const Field& c0,
               const RunOptions& opts) {
  PFConfig c = cfg;
  const double tau0 = cfg.time_step();
  const long nsteps = cfg.end_time > 0.0 ? static_cast<long>(std::ceil(cfg.end_time / tau0 - 1e-9)) : 0;
  if (nsteps > 0) c.tau = cfg.end_time / static_cast<double>(nsteps);
  CahnLarcheStepper stepper(g, c, potential);
  PFState s = stepper.make_state(c0);

  Trajectory traj;
  auto record = [&](const PFState& st) {
    const EnergyParts e = stepper.energy(st);
    traj.t.push_back(st.time);
    traj.mass.push_back(weighted_mean(st.c));
    traj.E1.push_back(e.E1);
    traj.E2.push_back(e.E2);
    traj.Etot.push_back(e.total());
    traj.max_abs_c.push_back(max_abs(st.c));
  };
  std::size_t next_sample = 0;
  auto sample = [&](const PFState& st) {
    const double half = 0.5 * stepper.time_step();
    while (next_sample < opts.sample_times.size() && opts.sample_times[next_sample] <= st.time + half) {
      traj.frames.push_back(st);
      if (opts.extract_contours) traj.contours.push_back(extract_zero_contour(st.c));
      ++next_sample;
    }
  };

  record(s);
  sample(s);
  const int every = std::max(1, opts.diagnostics_every);
  for (long k = 1; k <= nsteps; ++k) {
    stepper.step(s);
    if (k % every == 0 || k == nsteps) record(s);
    sample(s);
    if (opts.on_step) opts.on_step(s, k);
  }
  traj.final_state = std::move(s);
  return traj;
}

}  // namespace larche
