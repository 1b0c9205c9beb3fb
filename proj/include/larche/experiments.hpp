#pragma once

#include <optional>
#include <vector>

#include "larche/approx.hpp"
#include "larche/phasefield.hpp"
#include "larche/sharpref.hpp"

namespace larche {

/// A single circle of radius R centred in [0, L]^2, started from the glued
/// profile and run with h = eps / h_per_eps nodes.
struct CircleSetup {
  double epsilon = 0.04;
  double L = 2.2;
  double R = 0.4;
  double nodes_per_eps = 4.0;
  double tau_factor = 1.0;
  /// 0 picks 0.2 (eps / 0.08)^2.
  double end_time = 0.0;
  int order = 1;
  int samples = 10;
  LaplacianKind laplacian = LaplacianKind::spectral;
  std::optional<RadialElasticParams> elasticity;

  Grid2D grid() const;
  double resolved_end_time() const;
};

struct CircleResult {
  double epsilon = 0.0;
  int n = 0;
  double tau = 0.0;
  long steps = 0;
  double mu_ref = 0.0;           ///< sharp mu of the radial reference (disk of radius L/2)
  double sigma_kappa_ref = 0.0;  ///< sigma * kappa of the initial circle
  double elastic_jump_ref = 0.0;
  double gt_residual = 0.0;      ///< max |mu - sigma kappa - elastic term| on the final contour
  double mu_ref_error = 0.0;     ///< max |mu_meas - mu_ref| on the final contour
  double elastic_part_error = 0.0;  ///< |mean(mu_meas - sigma kappa) - elastic_jump_ref| on the final contour
  double velocity = 0.0;         ///< max |V| between the last two samples
  double stefan_residual = 0.0;
  double err_mu = 0.0;           ///< sup over samples of max_x |mu - mu_ref|
  double err_c = 0.0;            ///< sup over samples of max over |d| < 8 eps of |c - theta0(d / eps)|
  double final_radius = 0.0;
  double mass_drift = 0.0;
  double wall_seconds = 0.0;
};

/// Throws whatever the stepper or the meters throw.
CircleResult run_circle(const CircleSetup& s, const Profiles& profiles, const DoubleWell& potential);

/// Residuals of the approximate solution of a circle at one eps.
struct BuildSetup {
  double epsilon = 0.04;
  double L = 1.2;
  double R = 0.25;
  double nodes_per_eps = 4.0;
  LaplacianKind laplacian = LaplacianKind::spectral;
  std::optional<RadialElasticParams> elasticity;
  double C_star = 10.0;
};

struct BuildRow {
  double epsilon = 0.0;
  int n = 0;
  double h = 0.0;
  ResidualNorms order1;
  ResidualNorms order0;
  double err_mu = 0.0;  ///< max |mu_A - mu_ref|
  double err_c = 0.0;   ///< max over the tube of |c_A - theta0(d / eps)|
  StructureReport structure;
};

BuildRow residual_row(const BuildSetup& s, const Profiles& profiles, const DoubleWell& potential);

}  // namespace larche
