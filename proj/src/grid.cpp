#include "larche/grid.hpp"

#include <algorithm>
#include <string>

namespace larche {

Grid2D::Grid2D(int nx, int ny, double Lx, double Ly) : nx_(nx), ny_(ny), Lx_(Lx), Ly_(Ly) {
  if (nx < 4 || ny < 4) throw std::invalid_argument("Grid2D: need at least 4 nodes per direction");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw std::invalid_argument("Grid2D: domain lengths must be positive");
}

double bilinear(const Field& f, Vec2 p) {
  const Grid2D& g = f.grid();
  const double tol = 1e-12 * std::max(g.Lx(), g.Ly());
  if (!g.contains(p, tol)) {
    throw std::out_of_range("sample outside domain at (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ")");
  }
  const double sx = std::clamp(p.x / g.hx(), 0.0, static_cast<double>(g.nx() - 1));
  const double sy = std::clamp(p.y / g.hy(), 0.0, static_cast<double>(g.ny() - 1));
  int i = std::min(static_cast<int>(sx), g.nx() - 2);
  int j = std::min(static_cast<int>(sy), g.ny() - 2);
  const double tx = sx - i;
  const double ty = sy - j;
  return (1 - tx) * (1 - ty) * f(i, j) + tx * (1 - ty) * f(i + 1, j) + (1 - tx) * ty * f(i, j + 1) +
         tx * ty * f(i + 1, j + 1);
}

double bicubic(const Field& f, Vec2 p) {
  const Grid2D& g = f.grid();
  const double tol = 1e-12 * std::max(g.Lx(), g.Ly());
  if (!g.contains(p, tol)) {
    throw std::out_of_range("sample outside domain at (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ")");
  }
  auto weights = [](double s, int n, int& base, double w[4]) {
    base = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, n - 4);
    const double t = s - base;  // nodes at 0, 1, 2, 3
    w[0] = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    w[1] = t * (t - 2) * (t - 3) / 2.0;
    w[2] = -t * (t - 1) * (t - 3) / 2.0;
    w[3] = t * (t - 1) * (t - 2) / 6.0;
  };
  int i0, j0;
  double wx[4], wy[4];
  weights(std::clamp(p.x / g.hx(), 0.0, g.nx() - 1.0), g.nx(), i0, wx);
  weights(std::clamp(p.y / g.hy(), 0.0, g.ny() - 1.0), g.ny(), j0, wy);
  double v = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += wx[a] * f(i0 + a, j0 + b);
    v += wy[b] * row;
  }
  return v;
}

double integrate(const Field& f) {
  const Grid2D& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) s += g.node_weight(i, j) * f(i, j);
  return s;
}

double weighted_mean(const Field& f) { return integrate(f) / (f.grid().Lx() * f.grid().Ly()); }

double l2_norm(const Field& f) {
  const Grid2D& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) s += g.node_weight(i, j) * f(i, j) * f(i, j);
  return std::sqrt(s);
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Field& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

VectorField gradient(const Field& f) {
  const Grid2D& g = f.grid();
  VectorField out(g);
  const int nx = g.nx(), ny = g.ny();
  const double hx = g.hx(), hy = g.hy();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (i == 0)
        out.x(i, j) = (f(1, j) - f(0, j)) / hx;
      else if (i == nx - 1)
        out.x(i, j) = (f(nx - 1, j) - f(nx - 2, j)) / hx;
      else
        out.x(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2 * hx);
      if (j == 0)
        out.y(i, j) = (f(i, 1) - f(i, 0)) / hy;
      else if (j == ny - 1)
        out.y(i, j) = (f(i, ny - 1) - f(i, ny - 2)) / hy;
      else
        out.y(i, j) = (f(i, j + 1) - f(i, j - 1)) / (2 * hy);
    }
  }
  return out;
}

}  // namespace larche
