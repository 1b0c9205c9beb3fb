#include "larche/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "larche/elastic_solver.hpp"

namespace larche {
namespace {

double vector_l2(const VectorField& v) {
  const double a = l2_norm(v.x), b = l2_norm(v.y);
  return std::sqrt(a * a + b * b);
}

double vector_max(const VectorField& v) {
  double m = 0.0;
  for (std::size_t k = 0; k < v.x.size(); ++k) m = std::max(m, std::hypot(v.x[k], v.y[k]));
  return m;
}

bool dilatational(const Eigenstrain& E) {
  const Mat2& m = E.matrix();
  return m.xy == 0.0 && m.yx == 0.0 && m.xx == m.yy;
}

}  // namespace

OuterFields constant_outer_fields(double mu) {
  OuterFields o;
  o.mu_plus = [mu](Vec2) { return mu; };
  o.mu_minus = o.mu_plus;
  return o;
}

OuterFields radial_outer_fields(const RadialReference& ref, Vec2 center) {
  OuterFields o = constant_outer_fields(ref.mu_value);
  if (ref.elastic) {
    const RadialElasticFields e = *ref.elastic;
    o.u_plus = [e, center](Vec2 x) {
      const Vec2 r = x - center;
      const double n = r.norm();
      return n < 1e-14 ? Vec2{} : r * ((e.B * n + e.D / n) / n);
    };
    o.u_minus = [e, center](Vec2 x) { return (x - center) * e.A; };
  }
  return o;
}

ApproxSolution build(const Grid2D& g, const Shape& shape, const BuildOptions& opt, const Profiles& P,
                     const OuterFields& outer) {
  if (opt.order != 0 && opt.order != 1) throw std::invalid_argument("approx::build: order must be 0 or 1");
  if (!outer.mu_plus || !outer.mu_minus) throw std::invalid_argument("approx::build: missing sharp mu fields");
  const double eps = opt.epsilon, delta = opt.delta;
  const SignedDistanceMap dist = sdf(shape);

  ApproxSolution a;
  a.order = opt.order;
  a.epsilon = eps;
  a.delta = delta;
  a.shape = shape;
  a.c = init_glued(g, dist, eps, delta, P.theta0, P.theta1, opt.order == 1);
  a.mu = Field(g);
  a.u = VectorField(g);
  a.distance = Field(g);
  a.p = Field(g);
  a.zeta = Field(g);

  const bool bridge_u = opt.displacement == DisplacementModel::bridged && (outer.u_plus || outer.u_minus);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 x = g.node(i, j);
      const SdfSample s = dist.eval(x);
      const double zeta = cutoff(s.d / delta);
      const double eta = P.eta(s.d / eps);
      a.distance(i, j) = s.d;
      a.p(i, j) = s.curvature;
      a.zeta(i, j) = zeta;
      const double mp = outer.mu_plus(x), mm = outer.mu_minus(x);
      a.mu(i, j) = zeta * (mp * eta + mm * (1.0 - eta)) + (1.0 - zeta) * (s.d >= 0.0 ? mp : mm);
      if (bridge_u) {
        const Vec2 up = outer.u_plus ? outer.u_plus(x) : Vec2{};
        const Vec2 um = outer.u_minus ? outer.u_minus(x) : Vec2{};
        const Vec2 u = zeta * (up * eta + um * (1.0 - eta)) + (1.0 - zeta) * (s.d >= 0.0 ? up : um);
        a.u.x(i, j) = u.x;
        a.u.y(i, j) = u.y;
      }
    }
  }

  if (opt.displacement == DisplacementModel::radial_equilibrium) {
    if (shape.kind != ShapeKind::circle) throw std::invalid_argument("approx::build: radial equilibrium needs a circle");
    if (!opt.elasticity || !opt.elasticity->C.is_isotropic() || !dilatational(opt.elasticity->E))
      throw std::invalid_argument("approx::build: radial equilibrium needs isotropic C and E* = e I");
    const Vec2 c0 = shape.center;
    double Rout = opt.Rout;
    if (Rout <= 0.0) {
      for (Vec2 corner : {Vec2{0, 0}, Vec2{g.Lx(), 0}, Vec2{0, g.Ly()}, Vec2{g.Lx(), g.Ly()}})
        Rout = std::max(Rout, (corner - c0).norm());
      Rout *= 1.01;
    }
    const double R = shape.R;
    const bool first = opt.order == 1;
    // c_A along a ray; the distance map of a circle is r - R.
    auto c_of_r = [&P, R, eps, delta, first](double r) {
      SdfSample s;
      s.d = r - R;
      s.curvature = 1.0 / R;
      return glued_value(s, eps, delta, P.theta0, P.theta1, first);
    };
    const RadialEquilibrium eq(c_of_r, Rout, opt.elasticity->C.lambda(), opt.elasticity->C.mu(),
                               opt.elasticity->E.matrix().xx);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const Vec2 u = eq.u(g.node(i, j) - c0);
        a.u.x(i, j) = u.x;
        a.u.y(i, j) = u.y;
      }
  }
  return a;
}

Residuals residuals(const ApproxSolution& a, const DoubleWell& potential,
                    const std::optional<ElasticSetup>& elasticity, LaplacianKind laplacian) {
  const Grid2D& g = a.c.grid();
  const double eps = a.epsilon;
  Residuals r;
  r.r_A = Field(g);
  r.mass_defect = Field(g);
  r.s_A = VectorField(g);
  Field lap(g);
  apply_laplacian(a.c, lap, laplacian);
  Field Wc(g);
  if (elasticity) {
    const ElasticSolver solver(g, elasticity->C, elasticity->E);
    Wc = solver.dWdc(a.u, a.c);
    r.s_A = solver.divergence_of_stress(a.u, a.c);
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    r.r_A[k] = a.mu[k] + eps * lap[k] - potential.f(a.c[k]) / eps - Wc[k];
  apply_laplacian(a.mu, r.mass_defect, laplacian);

  r.norms.r_l2 = l2_norm(r.r_A);
  r.norms.r_max = max_abs(r.r_A);
  r.norms.s_l2 = vector_l2(r.s_A);
  r.norms.s_max = vector_max(r.s_A);
  r.norms.mass_l2 = l2_norm(r.mass_defect);
  r.norms.mass_max = max_abs(r.mass_defect);
  return r;
}

StructureReport structure_check(const ApproxSolution& a, const Profiles& P, const DoubleWell& potential,
                                double C_star) {
  if (!(C_star > 0.0)) throw std::invalid_argument("structure_check: C_star must be positive");
  const Grid2D& g = a.c.grid();
  const double eps = a.epsilon, delta = a.delta;
  const bool first = a.order == 1;
  const SignedDistanceMap dist = sdf(a.shape);
  const double th_plus = P.theta1.limit_plus, th_minus = P.theta1.limit_minus;
  const double ht = 1e-5;

  StructureReport rep;
  rep.C_star = C_star;
  rep.min_fprime_outer = std::numeric_limits<double>::infinity();
  rep.min_signed_outer = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double d = a.distance(i, j), p = first ? a.p(i, j) : 0.0, zeta = a.zeta(i, j);
      const double side = d >= 0.0 ? 1.0 : -1.0;
      const double phi = side + eps * p * (side > 0 ? th_plus : th_minus);
      rep.min_fprime_outer = std::min(rep.min_fprime_outer, potential.fp(phi));
      rep.min_signed_outer = std::min(rep.min_signed_outer, side * phi);
      if (std::abs(d) >= 2.0 * delta) continue;

      rep.sup_p = std::max(rep.sup_p, std::abs(p));
      if (zeta > 0.0) {
        const double z = d / eps;
        const double inner = P.theta0.at(z) + eps * p * P.theta1.at(z);
        const double q = (a.c(i, j) - zeta * inner - (1.0 - zeta) * phi) / (zeta * eps * eps);
        rep.sup_q_weighted = std::max(rep.sup_q_weighted, eps / (eps + std::abs(d)) * std::abs(q));
      }
      // tangential derivative of the analytic profile
      const Vec2 x = g.node(i, j);
      const SdfSample s = dist.eval(x);
      const Vec2 t{-s.normal.y, s.normal.x};
      const double fp = glued_value(dist.eval(x + t * ht), eps, delta, P.theta0, P.theta1, first);
      const double fm = glued_value(dist.eval(x - t * ht), eps, delta, P.theta0, P.theta1, first);
      rep.sup_tangential = std::max(rep.sup_tangential, std::abs(fp - fm) / (2.0 * ht));
    }
  }
  switch (a.shape.kind) {
    case ShapeKind::circle:
      rep.geometry_proxy = 1.0 / a.shape.R;
      break;
    case ShapeKind::ellipse: {
      // max curvature plus max |dk/ds| sampled along the parametrization
      const double A = a.shape.a, B = a.shape.b;
      double kmax = 0.0, dk = 0.0;
      const int n = 4096;
      auto kappa = [&](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return A * B / std::pow(A * A * s * s + B * B * c * c, 1.5);
      };
      for (int k = 0; k < n; ++k) {
        const double t0 = 2 * M_PI * k / n, t1 = 2 * M_PI * (k + 1) / n;
        const double ds = std::hypot(A * (std::cos(t1) - std::cos(t0)), B * (std::sin(t1) - std::sin(t0)));
        kmax = std::max(kmax, kappa(t0));
        dk = std::max(dk, std::abs(kappa(t1) - kappa(t0)) / ds);
      }
      rep.geometry_proxy = kmax + dk;
      break;
    }
    case ShapeKind::polyline:
      rep.geometry_proxy = curvature_proxy(canonicalize(extract_zero_contour(a.c)));
      break;
  }
  rep.passed = rep.sup_p + rep.sup_q_weighted <= C_star && rep.sup_tangential <= C_star &&
               rep.min_fprime_outer >= 1.0 / C_star && rep.min_signed_outer > 0.0;
  return rep;
}

RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size()) throw std::invalid_argument("rate_fit: size mismatch");
  if (eps.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 points");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0) || !(err[k] > 0.0)) throw std::invalid_argument("rate_fit: inputs must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw std::invalid_argument("rate_fit: epsilons must strictly decrease");
  }
  const double n = static_cast<double>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double x = std::log(eps[k]), y = std::log(err[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  RateFit f;
  f.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.constant = std::exp((sy - f.order * sx) / n);
  return f;
}

}  // namespace larche
