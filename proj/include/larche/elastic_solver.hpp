#pragma once

#include <array>
#include <memory>

#include "larche/dct.hpp"
#include "larche/elasticity.hpp"
#include "larche/grid.hpp"

namespace larche {

struct ElasticSolveStats {
  int iterations = 0;
  bool direct = false;  ///< solved with the cached factorization
  double residual = 0.0;  ///< final ||r||_2
  double rhs_norm = 0.0;  ///< ||b||_2, the residual of the zero initial guess
};

/// Bilinear (Q1) finite elements on the node grid with 2x2 Gauss quadrature.
/// Concentration is interpolated bilinearly from the nodes, so the discrete
/// elastic energy is
///   E2(u, c) = 1/2 u^T K u - u^T G c + 1/2 kappa c^T M c,
/// the exact Gauss quadrature of int W. Displacements are clamped on the
/// boundary; the interior system is solved by conjugate gradients
/// preconditioned with a fast sine-transform solve of a scaled Laplacian.
/// K does not depend on c, so from the second solve on (repeated solves in
/// time stepping) a sparse Cholesky factorization of K is cached and used
/// when the interior system has at most kDirectMaxDofs unknowns; CG then only
/// confirms the tolerance.
class ElasticSolver {
 public:
  static constexpr std::size_t kDirectMaxDofs = 2 * 200 * 200;

  ElasticSolver(const Grid2D& g, const ElasticityTensor& C, const Eigenstrain& E);
  ~ElasticSolver();

  const Grid2D& grid() const { return grid_; }
  const ElasticityTensor& tensor() const { return C_; }
  const Eigenstrain& eigenstrain() const { return E_; }

  /// Solves div S + b = 0 with u = boundary on the boundary (zero if null).
  /// tol is relative to ||b||; guess is used as the warm start for interior nodes.
  /// Throws std::runtime_error if max_iter is exceeded.
  VectorField solve(const Field& c, double tol, const VectorField* body_force = nullptr,
                    const VectorField* boundary = nullptr, const VectorField* guess = nullptr,
                    int max_iter = 5000);
  const ElasticSolveStats& last_stats() const { return stats_; }

  double energy(const VectorField& u, const Field& c) const;
  /// Nodal dE2/dc_i divided by the nodal trapezoid weight.
  Field dWdc(const VectorField& u, const Field& c) const;
  /// Discrete div S at interior nodes: (G c - K u) / (hx hy); zero on the boundary.
  VectorField divergence_of_stress(const VectorField& u, const Field& c) const;
  /// K u on interior rows, zero on boundary rows.
  VectorField apply_K(const VectorField& u) const;

 private:
  void apply_interior(const double* ux, const double* uy, double* ox, double* oy) const;
  void precondition(const double* rx, const double* ry, double* zx, double* zy) const;

  Grid2D grid_;
  ElasticityTensor C_;
  Eigenstrain E_;
  std::array<double, 64> Ke_{};  // 8x8, dof 2a + comp
  std::array<double, 32> Ge_{};  // 8x4
  std::array<double, 16> Me_{};  // 4x4
  double kappa_ = 0.0;
  std::array<std::array<std::array<double, 9>, 2>, 2> Kst_{};
  std::array<std::array<double, 9>, 2> Gst_{};
  std::unique_ptr<DirichletSpectral> pre_;
  struct Direct;
  std::unique_ptr<Direct> direct_;
  int solves_ = 0;
  ElasticSolveStats stats_;
};

/// Convenience wrapper: clamped boundary, zero body force.
VectorField solve_displacement(const ElasticityTensor& C, const Eigenstrain& E, const Field& c, double tol);

}  // namespace larche
