#include "larche/sharpref.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace larche {
namespace {

Mat2 sample_gradient(const VectorField& grad_x, const VectorField& grad_y, Vec2 p) {
  // grad_x = gradient of u_x, grad_y = gradient of u_y; rows are components.
  return {bilinear(grad_x.x, p), bilinear(grad_x.y, p), bilinear(grad_y.x, p), bilinear(grad_y.y, p)};
}

Vec2 nearest_on_polyline(const InterfacePolyline& poly, Vec2 p) {
  const std::size_t n = poly.size();
  double best = std::numeric_limits<double>::infinity();
  Vec2 q;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = poly.points[k], b = poly.points[(k + 1) % n];
    const Vec2 ab = b - a;
    const double L2 = ab.dot(ab);
    const double t = L2 > 0 ? std::clamp((p - a).dot(ab) / L2, 0.0, 1.0) : 0.0;
    const Vec2 c = a + ab * t;
    const double d = (p - c).norm();
    if (d < best) {
      best = d;
      q = c;
    }
  }
  return q;
}

}  // namespace

RadialReference radial_reference(double R, double Rout, double sigma, std::optional<RadialElasticParams> elastic) {
  if (!(R > 0.0 && R < Rout)) throw std::invalid_argument("radial_reference: need 0 < R < Rout");
  RadialReference ref;
  ref.R = R;
  ref.Rout = Rout;
  ref.sigma = sigma;
  ref.kappa = -1.0 / R;
  if (elastic) {
    ref.elastic = radial_solution(R, Rout, elastic->lambda, elastic->mu, elastic->estar, -1.0, 1.0);
    ref.elastic_jump = ref.elastic->jump;
    ref.disk_geometry = true;
  }
  ref.mu_value = sigma * ref.kappa + ref.elastic_jump;
  ref.velocity = 0.0;
  return ref;
}

std::vector<GibbsThomsonPoint> gibbs_thomson_residual(const PFState& state, const InterfacePolyline& poly,
                                                      double sigma, double epsilon, double offset,
                                                      const ElasticSetup* elastic) {
  const Grid2D& g = state.c.grid();
  if (offset < std::max(2.0 * epsilon, 3.0 * g.h_max()) * (1.0 - 1e-12))
    throw std::invalid_argument("gibbs_thomson_residual: offset must be >= max(2 eps, 3 h)");
  VectorField gx, gy;
  if (elastic) {
    gx = gradient(state.u.x);
    gy = gradient(state.u.y);
  }
  std::vector<GibbsThomsonPoint> out;
  out.reserve(poly.size());
  try {
    for (std::size_t k = 0; k < poly.size(); ++k) {
      GibbsThomsonPoint r;
      r.s = poly.arclength[k];
      r.x = poly.points[k];
      r.kappa = poly.curvature[k];
      r.mu_meas = bilinear(state.mu, r.x);
      if (elastic) {
        const Vec2 nu = poly.normals[k];
        const Vec2 pp = r.x + nu * offset, pm = r.x - nu * offset;
        r.elastic_term = elastic_jump(elastic->C, elastic->E, sample_gradient(gx, gy, pp), sample_gradient(gx, gy, pm),
                                      bilinear(state.c, pp), bilinear(state.c, pm), nu);
      }
      r.residual = r.mu_meas - sigma * r.kappa - r.elastic_term;
      out.push_back(r);
    }
  } catch (const std::out_of_range&) {
    throw std::runtime_error("gibbs_thomson_residual: one-sided sample leaves the domain");
  }
  return out;
}

std::vector<StefanPoint> stefan_residual(const PFState& earlier, const PFState& later,
                                         const InterfacePolyline& poly_earlier,
                                         const InterfacePolyline& poly_later, double tau, double offset) {
  const double dt = later.time - earlier.time;
  if (!(tau > 0.0) || dt < 10.0 * tau * (1.0 - 1e-9))
    throw std::invalid_argument("stefan_residual: frames must be at least 10 steps apart");
  const double h = earlier.c.grid().h_max();
  std::vector<StefanPoint> out;
  out.reserve(poly_earlier.size());
  try {
    for (std::size_t k = 0; k < poly_earlier.size(); ++k) {
      StefanPoint r;
      r.s = poly_earlier.arclength[k];
      r.x = poly_earlier.points[k];
      const Vec2 nu = poly_earlier.normals[k];
      const Vec2 q = nearest_on_polyline(poly_later, r.x);
      if ((q - r.x).norm() > 5.0 * h)
        throw std::runtime_error("stefan_residual: contour point has no counterpart within 5 h");
      r.velocity = (q - r.x).dot(nu) / dt;
      r.jump = one_sided_sample(earlier.mu, r.x, nu, offset).normal_derivative_jump;
      r.residual = r.velocity + 0.5 * r.jump;
      out.push_back(r);
    }
  } catch (const std::out_of_range&) {
    throw std::runtime_error("stefan_residual: one-sided sample leaves the domain");
  }
  return out;
}

double max_abs_residual(const std::vector<GibbsThomsonPoint>& r) {
  double m = 0.0;
  for (const auto& p : r) m = std::max(m, std::abs(p.residual));
  return m;
}

double max_abs_residual(const std::vector<StefanPoint>& r) {
  double m = 0.0;
  for (const auto& p : r) m = std::max(m, std::abs(p.residual));
  return m;
}

void write_csv(const std::vector<GibbsThomsonPoint>& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "s,x,y,mu_meas,kappa,elastic_term,residual\n" << std::setprecision(17);
  for (const auto& p : r)
    out << p.s << ',' << p.x.x << ',' << p.x.y << ',' << p.mu_meas << ',' << p.kappa << ',' << p.elastic_term << ','
        << p.residual << '\n';
}

void write_csv(const std::vector<StefanPoint>& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "s,x,y,velocity,jump,residual\n" << std::setprecision(17);
  for (const auto& p : r)
    out << p.s << ',' << p.x.x << ',' << p.x.y << ',' << p.velocity << ',' << p.jump << ',' << p.residual << '\n';
}

}  // namespace larche
