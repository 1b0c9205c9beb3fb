#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace larche {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

/// Cell-vertex rectangular grid on [0, Lx] x [0, Ly]. Node (i, j) sits at
/// (i*hx, j*hy); boundary nodes lie on the domain boundary.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int nx, int ny, double Lx, double Ly);

  /// Square grid helper.
  static Grid2D square(int n, double L) { return Grid2D(n, n, L, L); }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double Lx() const { return Lx_; }
  double Ly() const { return Ly_; }
  double hx() const { return Lx_ / (nx_ - 1); }
  double hy() const { return Ly_ / (ny_ - 1); }
  double h_max() const { return std::max(hx(), hy()); }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  Vec2 node(int i, int j) const { return {i * hx(), j * hy()}; }

  /// Trapezoid quadrature weight (area) of node (i, j).
  double node_weight(int i, int j) const {
    double w = hx() * hy();
    if (i == 0 || i == nx_ - 1) w *= 0.5;
    if (j == 0 || j == ny_ - 1) w *= 0.5;
    return w;
  }

  bool contains(Vec2 p, double slack = 0.0) const {
    return p.x >= -slack && p.x <= Lx_ + slack && p.y >= -slack && p.y <= Ly_ + slack;
  }

  bool operator==(const Grid2D& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && Lx_ == o.Lx_ && Ly_ == o.Ly_;
  }

 private:
  int nx_ = 0;
  int ny_ = 0;
  double Lx_ = 0.0;
  double Ly_ = 0.0;
};

/// Scalar nodal field, row-major with x fastest.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid2D& g, double value = 0.0) : grid_(g), data_(g.size(), value) {}

  const Grid2D& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  double& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  template <class Fn>
  static Field from_function(const Grid2D& g, Fn&& fn) {
    Field f(g);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) f(i, j) = fn(g.node(i, j));
    return f;
  }

 private:
  Grid2D grid_;
  std::vector<double> data_;
};

struct VectorField {
  Field x;
  Field y;

  VectorField() = default;
  explicit VectorField(const Grid2D& g) : x(g), y(g) {}
  const Grid2D& grid() const { return x.grid(); }
};

/// Average of fn over the dual cell of every node (S x S midpoint samples,
/// clipped to the domain). Used to sample discontinuous data conservatively.
template <class Fn>
Field dual_cell_average(const Grid2D& g, Fn&& fn, int S = 16) {
  Field f(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 p = g.node(i, j);
      const double x0 = std::max(0.0, p.x - 0.5 * g.hx()), x1 = std::min(g.Lx(), p.x + 0.5 * g.hx());
      const double y0 = std::max(0.0, p.y - 0.5 * g.hy()), y1 = std::min(g.Ly(), p.y + 0.5 * g.hy());
      double s = 0.0;
      for (int b = 0; b < S; ++b)
        for (int a = 0; a < S; ++a)
          s += fn(Vec2{x0 + (a + 0.5) / S * (x1 - x0), y0 + (b + 0.5) / S * (y1 - y0)});
      f(i, j) = s / (S * S);
    }
  }
  return f;
}

/// Bilinear interpolation; throws std::out_of_range outside the grid.
double bilinear(const Field& f, Vec2 p);

/// Tensor-product cubic Lagrange interpolation on the 4x4 nodes around p
/// (stencil shifted inward at the boundary). Needs at least 4 nodes per direction.
double bicubic(const Field& f, Vec2 p);

/// Trapezoid-weighted integral and mean.
double integrate(const Field& f);
double weighted_mean(const Field& f);
/// Trapezoid-weighted L2 norm.
double l2_norm(const Field& f);
double max_abs(const Field& f);
bool all_finite(const Field& f);

/// Centered-difference gradient (one-sided on the boundary).
VectorField gradient(const Field& f);

}  // namespace larche
