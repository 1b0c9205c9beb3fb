#include "larche/geometry.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace larche {
namespace {

constexpr double kCurvatureWindow = 4.0;

double shoelace(const std::vector<Vec2>& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec2 a = p[k], b = p[(k + 1) % p.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

}  // namespace

Shape Shape::circle(Vec2 c, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("Shape::circle: radius must be positive");
  Shape s;
  s.kind = ShapeKind::circle;
  s.center = c;
  s.R = s.a = s.b = R;
  return s;
}

Shape Shape::ellipse(Vec2 c, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("Shape::ellipse: semi-axes must be positive");
  Shape s;
  s.kind = ShapeKind::ellipse;
  s.center = c;
  s.a = a;
  s.b = b;
  s.R = std::min(a, b);
  return s;
}

Shape Shape::from_polyline(std::vector<Vec2> pts) {
  if (pts.size() < 3) throw std::invalid_argument("Shape::from_polyline: need at least 3 points");
  if (shoelace(pts) > 0.0) std::reverse(pts.begin(), pts.end());
  Shape s;
  s.kind = ShapeKind::polyline;
  s.points = std::move(pts);
  return s;
}

double Shape::min_radius_of_curvature() const {
  switch (kind) {
    case ShapeKind::circle: return R;
    case ShapeKind::ellipse: return std::min(a * a / b, b * b / a);
    case ShapeKind::polyline: return 0.0;
  }
  return 0.0;
}

SignedDistanceMap::SignedDistanceMap(Shape s) : shape_(std::move(s)) {
  if (shape_.kind == ShapeKind::polyline) {
    InterfacePolyline p;
    p.points = shape_.points;
    if (p.points.size() >= 16) {
      p = curvature_normals(std::move(p));
      for (double k : p.curvature) poly_curv_.push_back(-k);
    } else {
      poly_curv_.assign(p.points.size(), 0.0);
    }
  }
}

SignedDistanceMap sdf(const Shape& s) { return SignedDistanceMap(s); }

SdfSample SignedDistanceMap::eval(Vec2 x) const {
  switch (shape_.kind) {
    case ShapeKind::circle: {
      const Vec2 p = x - shape_.center;
      const double r = p.norm();
      SdfSample s;
      s.d = r - shape_.R;
      s.normal = r > 0.0 ? p * (1.0 / r) : Vec2{1.0, 0.0};
      s.projection = shape_.center + s.normal * shape_.R;
      s.curvature = 1.0 / shape_.R;
      return s;
    }
    case ShapeKind::ellipse: return eval_ellipse(x);
    case ShapeKind::polyline: return eval_polyline(x);
  }
  return {};
}

SdfSample SignedDistanceMap::eval_ellipse(Vec2 x) const {
  const double a = shape_.a, b = shape_.b;
  const Vec2 p = x - shape_.center;
  const double sx = p.x < 0 ? -1.0 : 1.0, sy = p.y < 0 ? -1.0 : 1.0;
  const double px = std::abs(p.x), py = std::abs(p.y);
  auto dist2 = [&](double t) {
    const double ex = a * std::cos(t) - px, ey = b * std::sin(t) - py;
    return ex * ex + ey * ey;
  };
  constexpr int kCoarse = 64;
  double t = 0.0, best = dist2(0.0);
  for (int k = 1; k <= kCoarse; ++k) {
    const double tk = 0.5 * std::numbers::pi * k / kCoarse;
    const double v = dist2(tk);
    if (v < best) {
      best = v;
      t = tk;
    }
  }
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const double c = std::cos(t), s = std::sin(t);
    const double rx = px - a * c, ry = py - b * s;
    const double dx = -a * s, dy = b * c;
    const double g = rx * dx + ry * dy;
    const double gp = -(dx * dx + dy * dy) + rx * (-a * c) + ry * (-b * s);
    if (gp == 0.0) break;
    double tn = t - g / gp;
    tn = std::clamp(tn, 0.0, 0.5 * std::numbers::pi);
    const double step = std::abs(tn - t);
    t = tn;
    if (step < 1e-14 || std::abs(g) < 1e-15 * (a + b) * (a + b)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("sdf: ellipse projection did not converge in 50 Newton steps");
  const double c = std::cos(t), s = std::sin(t);
  SdfSample out;
  const Vec2 q{sx * a * c, sy * b * s};
  out.projection = shape_.center + q;
  const double dist = std::sqrt(dist2(t));
  const bool inside = (px / a) * (px / a) + (py / b) * (py / b) < 1.0;
  out.d = inside ? -dist : dist;
  Vec2 n{sx * b * c, sy * a * s};
  out.normal = n * (1.0 / n.norm());
  const double den = a * a * s * s + b * b * c * c;
  out.curvature = a * b / (den * std::sqrt(den));
  return out;
}

SdfSample SignedDistanceMap::eval_polyline(Vec2 x) const {
  const auto& P = shape_.points;
  const std::size_t n = P.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t bk = 0;
  double bt = 0.0;
  bool inside = false;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 A = P[k], B = P[(k + 1) % n];
    const Vec2 AB = B - A;
    const double L2 = AB.dot(AB);
    double t = L2 > 0 ? (x - A).dot(AB) / L2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double d = (x - (A + AB * t)).norm();
    if (d < best) {
      best = d;
      bk = k;
      bt = t;
    }
    if ((A.y > x.y) != (B.y > x.y)) {
      const double xc = A.x + (x.y - A.y) / (B.y - A.y) * (B.x - A.x);
      if (x.x < xc) inside = !inside;
    }
  }
  SdfSample s;
  const Vec2 A = P[bk], B = P[(bk + 1) % n];
  s.projection = A + (B - A) * bt;
  s.d = inside ? -best : best;
  if (best > 1e-14) {
    s.normal = (x - s.projection) * (1.0 / s.d);
  } else {
    const Vec2 t = (B - A) * (1.0 / (B - A).norm());
    s.normal = {-t.y, t.x};
  }
  s.curvature = (1.0 - bt) * poly_curv_[bk] + bt * poly_curv_[(bk + 1) % n];
  return s;
}

double InterfacePolyline::signed_area() const { return shoelace(points); }

double InterfacePolyline::mean_radius(Vec2 c) const {
  double s = 0.0;
  for (const auto& p : points) s += (p - c).norm();
  return s / static_cast<double>(points.size());
}

double InterfacePolyline::max_radius_error(Vec2 c, double R) const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, std::abs((p - c).norm() - R));
  return m;
}

InterfacePolyline extract_zero_contour(const Field& field) {
  const Grid2D& g = field.grid();
  const int nx = g.nx(), ny = g.ny();
  const int nh = (nx - 1) * ny;  // horizontal edges
  auto hid = [&](int i, int j) { return j * (nx - 1) + i; };
  auto vid = [&](int i, int j) { return nh + j * nx + i; };
  auto pos = [&](int i, int j) { return field(i, j) >= 0.0; };

  std::unordered_map<int, Vec2> cross;
  std::unordered_map<int, std::vector<int>> adj;
  auto crossing = [&](int id, int i0, int j0, int i1, int j1) {
    if (cross.count(id)) return;
    const double va = field(i0, j0), vb = field(i1, j1);
    const double t = va / (va - vb);
    cross[id] = g.node(i0, j0) + (g.node(i1, j1) - g.node(i0, j0)) * t;
  };
  auto link = [&](int e0, int e1) {
    adj[e0].push_back(e1);
    adj[e1].push_back(e0);
  };

  bool any_pos = false, any_neg = false;
  for (double v : field.values()) (v >= 0.0 ? any_pos : any_neg) = true;
  if (!(any_pos && any_neg)) throw std::runtime_error("extract_zero_contour: no interface");

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const bool s00 = pos(i, j), s10 = pos(i + 1, j), s01 = pos(i, j + 1), s11 = pos(i + 1, j + 1);
      const int bottom = hid(i, j), top = hid(i, j + 1), left = vid(i, j), right = vid(i + 1, j);
      std::vector<int> edges;
      if (s00 != s10) { crossing(bottom, i, j, i + 1, j); edges.push_back(bottom); }
      if (s10 != s11) { crossing(right, i + 1, j, i + 1, j + 1); edges.push_back(right); }
      if (s01 != s11) { crossing(top, i, j + 1, i + 1, j + 1); edges.push_back(top); }
      if (s00 != s01) { crossing(left, i, j, i, j + 1); edges.push_back(left); }
      if (edges.empty()) continue;
      if (edges.size() == 2) {
        link(edges[0], edges[1]);
        continue;
      }
      // Saddle: isolate the corners whose sign differs from the cell centre.
      const double centre = 0.25 * (field(i, j) + field(i + 1, j) + field(i, j + 1) + field(i + 1, j + 1));
      const bool sc = centre >= 0.0;
      if (s00 != sc) link(bottom, left);
      if (s10 != sc) link(bottom, right);
      if (s01 != sc) link(left, top);
      if (s11 != sc) link(right, top);
    }
  }

  for (const auto& [id, nb] : adj)
    if (nb.size() != 2) throw std::runtime_error("extract_zero_contour: open contour touches the boundary");

  std::vector<Vec2> loop;
  std::unordered_map<int, bool> seen;
  const int start = adj.begin()->first;
  int prev = -1, cur = start;
  do {
    seen[cur] = true;
    loop.push_back(cross.at(cur));
    const auto& nb = adj.at(cur);
    const int next = (nb[0] != prev) ? nb[0] : nb[1];
    prev = cur;
    cur = next;
  } while (cur != start);
  if (seen.size() != adj.size()) throw std::runtime_error("extract_zero_contour: multiple interface components");

  // Drop near-duplicates produced by crossings close to grid nodes.
  const double hmin = 0.2 * std::min(g.hx(), g.hy());
  std::vector<Vec2> pts;
  for (const auto& p : loop)
    if (pts.empty() || (p - pts.back()).norm() >= hmin) pts.push_back(p);
  while (pts.size() > 2 && (pts.front() - pts.back()).norm() < hmin) pts.pop_back();
  if (pts.size() < 3) throw std::runtime_error("extract_zero_contour: degenerate contour");

  // Orient so the positive phase lies to the left of the direction of travel.
  const Vec2 t = pts[1] - pts[0];
  const Vec2 mid = (pts[0] + pts[1]) * 0.5;
  const Vec2 nrm = Vec2{-t.y, t.x} * (1.0 / t.norm());
  const double eta = 0.25 * std::min(g.hx(), g.hy());
  const double dv = bilinear(field, mid + nrm * eta) - bilinear(field, mid - nrm * eta);
  if (dv < 0.0) std::reverse(pts.begin(), pts.end());

  InterfacePolyline poly;
  poly.points = std::move(pts);
  if (poly.points.size() < 16) throw std::runtime_error("extract_zero_contour: contour has fewer than 16 points");
  return curvature_normals(std::move(poly));
}

InterfacePolyline curvature_normals(InterfacePolyline poly) {
  const std::size_t n = poly.points.size();
  if (n < 16) throw std::invalid_argument("curvature_normals: need at least 16 points");
  const auto& P = poly.points;
  double scale = 0.0;
  for (const auto& p : P) scale = std::max(scale, std::max(std::abs(p.x), std::abs(p.y)));
  auto at = [&](long k) { return P[static_cast<std::size_t>((k % static_cast<long>(n) + n) % n)]; };
  for (std::size_t k = 0; k < n; ++k)
    if ((at(k + 1) - at(k)).norm() <= 1e-14 * (1.0 + scale))
      throw std::invalid_argument("curvature_normals: duplicate consecutive points");

  poly.arclength.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) poly.arclength[k] = poly.arclength[k - 1] + (P[k] - P[k - 1]).norm();
  poly.perimeter = poly.arclength[n - 1] + (P[0] - P[n - 1]).norm();

  // Local circle fit zeta = alpha (xi^2 + zeta^2) + beta xi + gamma in the
  // frame of the chord tangent, over a window of half-width W in arclength.
  // Exact for circles and well-conditioned for straight pieces.
  const double W = kCurvatureWindow * poly.perimeter / static_cast<double>(n);
  poly.normals.resize(n);
  poly.curvature.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const long kk = static_cast<long>(k);
    Vec2 t = at(kk + 1) - at(kk - 1);
    t = t * (1.0 / t.norm());
    const Vec2 nl{-t.y, t.x};
    const Vec2 p0 = P[k];
    double A[3][3] = {}, rhs[3] = {};
    auto add = [&](Vec2 q) {
      const Vec2 r = q - p0;
      const double xi = r.dot(t), ze = r.dot(nl);
      const double b[3] = {xi * xi + ze * ze, xi, 1.0};
      for (int r0 = 0; r0 < 3; ++r0) {
        rhs[r0] += b[r0] * ze;
        for (int c0 = 0; c0 < 3; ++c0) A[r0][c0] += b[r0] * b[c0];
      }
    };
    add(p0);
    for (int side : {-1, 1}) {
      double acc = 0.0;
      for (long m = 1; m < static_cast<long>(n) / 2; ++m) {
        acc += (at(kk + side * m) - at(kk + side * (m - 1))).norm();
        if (acc > W && m > 2) break;
        add(at(kk + side * m));
      }
    }
    // 3x3 solve by Cramer's rule
    auto det3 = [](const double M[3][3]) {
      return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
             M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double D = det3(A);
    double coef[3];
    for (int c0 = 0; c0 < 3; ++c0) {
      double M[3][3];
      for (int r0 = 0; r0 < 3; ++r0)
        for (int c1 = 0; c1 < 3; ++c1) M[r0][c1] = c1 == c0 ? rhs[r0] : A[r0][c1];
      coef[c0] = det3(M) / D;
    }
    const double alpha = coef[0], beta = coef[1], gamma = coef[2];
    const double q = std::sqrt(1.0 + beta * beta);
    poly.normals[k] = t * (-beta / q) + nl * (1.0 / q);
    poly.curvature[k] = 2.0 * alpha / std::sqrt(std::max(1e-300, 1.0 + beta * beta - 4.0 * alpha * gamma));
  }
  return poly;
}

InterfacePolyline canonicalize(InterfacePolyline poly) {
  if (poly.signed_area() > 0.0) std::reverse(poly.points.begin(), poly.points.end());
  return curvature_normals(std::move(poly));
}

OneSided one_sided_sample(const Field& field, Vec2 p, Vec2 nu, double offset) {
  const double h = field.grid().h_max();
  if (offset < 2.0 * h * (1.0 - 1e-12)) throw std::invalid_argument("one_sided_sample: offset must be >= 2h");
  const double p1 = bilinear(field, p + nu * offset);
  const double p2 = bilinear(field, p + nu * (offset + h));
  const double m1 = bilinear(field, p - nu * offset);
  const double m2 = bilinear(field, p - nu * (offset + h));
  OneSided r;
  r.plus = p1;
  r.minus = m1;
  r.normal_derivative_jump = (p2 - p1) / h - (m1 - m2) / h;
  return r;
}

Field level_set_curvature(const Field& f) {
  // Fourth-order centered differences (second order next to the boundary).
  const Grid2D& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  const double hx = g.hx(), hy = g.hy();
  auto dx = [&](int i, int j) {
    if (i >= 2 && i + 2 < nx) return (-f(i + 2, j) + 8 * f(i + 1, j) - 8 * f(i - 1, j) + f(i - 2, j)) / (12 * hx);
    return (f(i + 1, j) - f(i - 1, j)) / (2 * hx);
  };
  Field k(g);
  for (int j = 1; j + 1 < ny; ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      const bool wide = i >= 2 && j >= 2 && i + 2 < nx && j + 2 < ny;
      double fx, fy, fxx, fyy, fxy;
      if (wide) {
        fx = dx(i, j);
        fy = (-f(i, j + 2) + 8 * f(i, j + 1) - 8 * f(i, j - 1) + f(i, j - 2)) / (12 * hy);
        fxx = (-f(i + 2, j) + 16 * f(i + 1, j) - 30 * f(i, j) + 16 * f(i - 1, j) - f(i - 2, j)) / (12 * hx * hx);
        fyy = (-f(i, j + 2) + 16 * f(i, j + 1) - 30 * f(i, j) + 16 * f(i, j - 1) - f(i, j - 2)) / (12 * hy * hy);
        fxy = (-dx(i, j + 2) + 8 * dx(i, j + 1) - 8 * dx(i, j - 1) + dx(i, j - 2)) / (12 * hy);
      } else {
        fx = (f(i + 1, j) - f(i - 1, j)) / (2 * hx);
        fy = (f(i, j + 1) - f(i, j - 1)) / (2 * hy);
        fxx = (f(i + 1, j) - 2 * f(i, j) + f(i - 1, j)) / (hx * hx);
        fyy = (f(i, j + 1) - 2 * f(i, j) + f(i, j - 1)) / (hy * hy);
        fxy = (f(i + 1, j + 1) - f(i - 1, j + 1) - f(i + 1, j - 1) + f(i - 1, j - 1)) / (4 * hx * hy);
      }
      const double gn2 = fx * fx + fy * fy;
      k(i, j) = gn2 > 0.0 ? -(fxx * fy * fy - 2 * fx * fy * fxy + fyy * fx * fx) / (gn2 * std::sqrt(gn2)) : 0.0;
    }
  }
  for (int i = 0; i < nx; ++i) {
    k(i, 0) = k(std::clamp(i, 1, nx - 2), 1);
    k(i, ny - 1) = k(std::clamp(i, 1, nx - 2), ny - 2);
  }
  for (int j = 0; j < ny; ++j) {
    k(0, j) = k(1, j);
    k(nx - 1, j) = k(nx - 2, j);
  }
  return k;
}

InterfacePolyline attach_curvature(InterfacePolyline poly, const Field& kappa) {
  for (std::size_t k = 0; k < poly.size(); ++k) poly.curvature[k] = bicubic(kappa, poly.points[k]);
  return poly;
}

double curvature_proxy(const InterfacePolyline& poly) {
  const std::size_t n = poly.size();
  double kmax = 0.0, dk = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    kmax = std::max(kmax, std::abs(poly.curvature[k]));
    const std::size_t k1 = (k + 1) % n;
    const double ds = (poly.points[k1] - poly.points[k]).norm();
    dk = std::max(dk, std::abs(poly.curvature[k1] - poly.curvature[k]) / ds);
  }
  return kmax + dk;
}

void write_polyline_csv(const InterfacePolyline& poly, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "x,y,nx,ny,kappa,s\n" << std::setprecision(17);
  for (std::size_t k = 0; k < poly.size(); ++k)
    out << poly.points[k].x << ',' << poly.points[k].y << ',' << poly.normals[k].x << ',' << poly.normals[k].y
        << ',' << poly.curvature[k] << ',' << poly.arclength[k] << '\n';
}

}  // namespace larche
