#pragma once

#include <memory>
#include <vector>

#include "larche/grid.hpp"

namespace larche {

/// DCT-I on the node grid: the exact eigenbasis of the mirror-ghost 5-point
/// Neumann Laplacian. Mode (kx, ky) is stored at ky * nx + kx.
class NeumannSpectral {
 public:
  explicit NeumannSpectral(const Grid2D& g);
  ~NeumannSpectral();
  NeumannSpectral(const NeumannSpectral&) = delete;
  NeumannSpectral& operator=(const NeumannSpectral&) = delete;

  const Grid2D& grid() const { return grid_; }
  /// Eigenvalues of -Delta_h, >= 0, zero only for mode (0, 0).
  const std::vector<double>& eigenvalues() const { return lambda_; }
  /// One-dimensional factors: eigenvalues() = x[kx] + y[ky].
  const std::vector<double>& eigenvalues_x() const { return lx_; }
  const std::vector<double>& eigenvalues_y() const { return ly_; }

  /// Unnormalized forward transform.
  void forward(const double* in, double* out) const;
  /// Inverse of forward (includes the normalization).
  void inverse(const double* in, double* out) const;

  /// Solves -Delta_h x = b - mean_w(b) with weighted mean of x equal to zero.
  void solve_poisson(const double* b, double* x) const;

 private:
  Grid2D grid_;
  std::vector<double> lambda_, lx_, ly_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

/// DST-I on interior nodes (homogeneous Dirichlet). Solves the separable
/// system scale * (ax * Lx + ay * Ly) x = b where Lx, Ly are the positive
/// 3-point second differences in each direction.
class DirichletSpectral {
 public:
  DirichletSpectral(int nx_interior, int ny_interior, double hx, double hy);
  ~DirichletSpectral();
  DirichletSpectral(const DirichletSpectral&) = delete;
  DirichletSpectral& operator=(const DirichletSpectral&) = delete;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  void solve(double ax, double ay, double scale, const double* b, double* x) const;

 private:
  int nx_, ny_;
  std::vector<double> lx_, ly_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

}  // namespace larche
