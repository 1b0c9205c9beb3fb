#include "larche/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace larche {
namespace {

int nodes_for(double L, double epsilon, double nodes_per_eps) {
  return static_cast<int>(std::ceil(L / (epsilon / nodes_per_eps))) + 1;
}

double tube_error(const Field& c, Vec2 center, double R, double eps, const ProfileTable& theta0) {
  const Grid2D& g = c.grid();
  double e = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double d = (g.node(i, j) - center).norm() - R;
      if (std::abs(d) < 8.0 * eps) e = std::max(e, std::abs(c(i, j) - theta0.at(d / eps)));
    }
  return e;
}

double max_deviation(const Field& f, double value) {
  double e = 0.0;
  for (double v : f.values()) e = std::max(e, std::abs(v - value));
  return e;
}

std::optional<ElasticSetup> isotropic_setup(const std::optional<RadialElasticParams>& p) {
  if (!p) return std::nullopt;
  return ElasticSetup{ElasticityTensor::isotropic(p->lambda, p->mu), Eigenstrain::dilatational(p->estar)};
}

}  // namespace

Grid2D CircleSetup::grid() const { return Grid2D::square(nodes_for(L, epsilon, nodes_per_eps), L); }

double CircleSetup::resolved_end_time() const {
  return end_time > 0.0 ? end_time : 0.2 * (epsilon / 0.08) * (epsilon / 0.08);
}

CircleResult run_circle(const CircleSetup& s, const Profiles& P, const DoubleWell& potential) {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid2D g = s.grid();
  const Vec2 center{0.5 * s.L, 0.5 * s.L};
  const double eps = s.epsilon;
  const Field c0 = init_glued(g, sdf(Shape::circle(center, s.R)), eps, 4 * eps, P.theta0, P.theta1, s.order == 1);

  PFConfig cfg;
  cfg.epsilon = eps;
  cfg.tau_factor = s.tau_factor;
  cfg.end_time = s.resolved_end_time();
  cfg.laplacian = s.laplacian;
  cfg.elasticity = isotropic_setup(s.elasticity);
  RunOptions opts;
  for (int k = 0; k <= s.samples; ++k) opts.sample_times.push_back(cfg.end_time * k / s.samples);
  opts.diagnostics_every = 10;
  const Trajectory tr = run(g, cfg, potential, c0, opts);

  const RadialReference ref = radial_reference(s.R, 0.5 * s.L, P.sigma, s.elasticity);
  CircleResult r;
  r.epsilon = eps;
  r.n = g.nx();
  r.mu_ref = ref.mu_value;
  r.sigma_kappa_ref = P.sigma * ref.kappa;
  r.elastic_jump_ref = ref.elastic_jump;
  for (const PFState& f : tr.frames) {
    r.err_mu = std::max(r.err_mu, max_deviation(f.mu, ref.mu_value));
    r.err_c = std::max(r.err_c, tube_error(f.c, center, s.R, eps, P.theta0));
  }
  const auto [mlo, mhi] = std::minmax_element(tr.mass.begin(), tr.mass.end());
  r.mass_drift = *mhi - *mlo;

  // step length as used by run(): end_time split into an integer number of steps
  r.steps = static_cast<long>(std::ceil(cfg.end_time / cfg.time_step() - 1e-9));
  r.tau = cfg.end_time / r.steps;

  const ElasticSetup* el = cfg.elasticity ? &*cfg.elasticity : nullptr;
  const double offset = std::max(2 * eps, 3 * g.h_max());
  const PFState& last = tr.frames.back();
  const PFState& prev = tr.frames[tr.frames.size() - 2];
  const InterfacePolyline poly = interface_from_phase(last.c, P.theta0, eps, &P.theta1);
  const InterfacePolyline poly_prev = interface_from_phase(prev.c, P.theta0, eps, &P.theta1);
  const auto gt = gibbs_thomson_residual(last, poly, P.sigma, eps, offset, el);
  r.gt_residual = max_abs_residual(gt);
  double mean_elastic = 0.0;
  for (const auto& q : gt) {
    r.mu_ref_error = std::max(r.mu_ref_error, std::abs(q.mu_meas - ref.mu_value));
    mean_elastic += (q.mu_meas - P.sigma * q.kappa) / static_cast<double>(gt.size());
  }
  r.elastic_part_error = std::abs(mean_elastic - ref.elastic_jump);
  const auto st = stefan_residual(prev, last, poly_prev, poly, r.tau, offset);
  for (const auto& q : st) r.velocity = std::max(r.velocity, std::abs(q.velocity));
  r.stefan_residual = max_abs_residual(st);
  r.final_radius = poly.mean_radius(center);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

BuildRow residual_row(const BuildSetup& s, const Profiles& P, const DoubleWell& potential) {
  const Grid2D g = Grid2D::square(nodes_for(s.L, s.epsilon, s.nodes_per_eps), s.L);
  const Vec2 center{0.5 * s.L, 0.5 * s.L};
  const Shape circle = Shape::circle(center, s.R);
  const auto elastic = isotropic_setup(s.elasticity);
  const RadialReference ref = radial_reference(s.R, 0.5 * s.L, P.sigma, s.elasticity);

  BuildOptions opt;
  opt.epsilon = s.epsilon;
  opt.delta = 4 * s.epsilon;
  if (elastic) {
    opt.displacement = DisplacementModel::radial_equilibrium;
    opt.elasticity = elastic;
  }
  const OuterFields outer = constant_outer_fields(ref.mu_value);
  BuildRow row;
  row.epsilon = s.epsilon;
  row.n = g.nx();
  row.h = g.hx();
  opt.order = 1;
  const ApproxSolution a1 = build(g, circle, opt, P, outer);
  row.order1 = residuals(a1, potential, elastic, s.laplacian).norms;
  row.structure = structure_check(a1, P, potential, s.C_star);
  row.err_mu = max_deviation(a1.mu, ref.mu_value);
  row.err_c = tube_error(a1.c, center, s.R, s.epsilon, P.theta0);
  opt.order = 0;
  row.order0 = residuals(build(g, circle, opt, P, outer), potential, elastic, s.laplacian).norms;
  return row;
}

}  // namespace larche
