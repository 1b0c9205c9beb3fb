#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "larche/phasefield.hpp"
#include "larche/potential.hpp"

namespace larche {

/// Linearized Cahn-Hilliard form around phi on a coarse Neumann grid:
/// Q(w) = <(-eps Delta_h + f'(phi) / eps) w, w> - gamma1 eps <w, w>
/// over trapezoid-weighted mean-zero w.
struct SpectralProblem {
  Field phi;
  double epsilon = 0.0;
  double gamma1 = 1.0;
  LaplacianKind laplacian = LaplacianKind::five_point;

  const Grid2D& grid() const { return phi.grid(); }
};

struct RayleighResult {
  double lambda_min = 0.0;
  Field witness;  ///< minimizer, mean zero, unit H^-1 norm
  /// Negative part of lambda_min: the constant C of the lower bound.
  double C() const { return lambda_min < 0.0 ? -lambda_min : 0.0; }
};

/// Largest grid accepted by the dense solvers (nodes per direction).
inline constexpr int kSpectralMaxNodes = 96;

/// min over mean-zero w of Q(w) / <w, (-Delta_h)^-1 w>. Dense symmetric
/// eigensolve in the cosine basis scaled by sqrt(lambda_k); the witness comes
/// from inverse iteration. Throws std::invalid_argument for grids above
/// kSpectralMaxNodes, non-positive epsilon or negative gamma1, and
/// std::runtime_error if the eigensolver fails.
RayleighResult min_rayleigh(const SpectralProblem& p, const DoubleWell& potential);

/// Q(w) / <w, (-Delta_h)^-1 w> after removing the weighted mean of w.
double rayleigh_quotient(const SpectralProblem& p, const DoubleWell& potential, const Field& w);

/// <w, (-Delta_h)^-1 w> with trapezoid weights; w is first made mean zero.
double hminus1_norm_sq(const Field& w, LaplacianKind kind = LaplacianKind::five_point);

/// Mean-zero Psi with -Delta_h Psi = w - mean(w).
Field inverse_laplacian(const Field& w, LaplacianKind kind = LaplacianKind::five_point);

struct DescentResult {
  double lambda_min = 0.0;
  std::vector<double> per_start;
  int max_iterations_used = 0;
};

/// Independent check of min_rayleigh: matrix-free projected gradient descent
/// on the Rayleigh quotient from `starts` random mean-zero vectors, with a
/// Rayleigh-Ritz step over {x, gradient, previous direction} each iteration.
DescentResult descent_min_rayleigh(const SpectralProblem& p, const DoubleWell& potential, int starts = 50,
                                   std::uint64_t seed = 1, int max_iterations = 20000, double tol = 1e-12);

struct UniformityRow {
  double epsilon = 0.0;
  double lambda_min = 0.0;
  double C = 0.0;
};

struct UniformityReport {
  std::vector<UniformityRow> rows;
  double ratio = 0.0;  ///< max C / min C (1 if all zero, inf if only some are)
  bool passed = false;
};

/// Solves one problem per epsilon (make(eps) builds it), on up to `threads`
/// worker threads. Passes iff every C is finite and ratio <= max_ratio.
/// Throws std::invalid_argument for fewer than 3 epsilons.
UniformityReport uniformity_report(const std::vector<double>& epsilons,
                                   const std::function<SpectralProblem(double)>& make,
                                   const DoubleWell& potential, int threads = 1, double max_ratio = 2.0);

/// CSV with header epsilon,lambda_min,C.
void write_csv(const UniformityReport& r, const std::string& path);

}  // namespace larche
