#pragma once

#include <optional>
#include <string>
#include <vector>

#include "larche/elasticity.hpp"
#include "larche/geometry.hpp"
#include "larche/phasefield.hpp"

namespace larche {

struct RadialElasticParams {
  double lambda = 1.0;
  double mu = 1.0;
  double estar = 0.0;
};

/// Sharp-interface state of a single circle of radius R in a disk of radius
/// Rout (inner phase c = -1, outer c = +1). mu is constant everywhere, so V = 0.
struct RadialReference {
  double R = 0.0;
  double Rout = 0.0;
  double sigma = 0.0;
  double kappa = 0.0;  ///< -1/R
  double elastic_jump = 0.0;
  double mu_value = 0.0;
  double velocity = 0.0;
  /// Elastic part solved in a disk; compared against square-domain runs only with a band.
  bool disk_geometry = false;
  std::optional<RadialElasticFields> elastic;
};

RadialReference radial_reference(double R, double Rout, double sigma,
                                 std::optional<RadialElasticParams> elastic = std::nullopt);

struct GibbsThomsonPoint {
  double s = 0.0;
  Vec2 x;
  double mu_meas = 0.0;
  double kappa = 0.0;
  double elastic_term = 0.0;
  double residual = 0.0;
};

/// mu(x) - sigma kappa - elastic term at every contour point. The elastic
/// term uses grad u and c sampled at x +- offset nu. Requires
/// offset >= max(2 eps, 3 h).
std::vector<GibbsThomsonPoint> gibbs_thomson_residual(const PFState& state, const InterfacePolyline& poly,
                                                      double sigma, double epsilon, double offset,
                                                      const ElasticSetup* elastic = nullptr);

struct StefanPoint {
  double s = 0.0;
  Vec2 x;
  double velocity = 0.0;  ///< normal velocity along nu (outward from the negative phase)
  double jump = 0.0;      ///< [d mu / d nu], plus minus minus
  double residual = 0.0;  ///< V + jump / 2
};

/// Normal velocity from nearest-point matching of the contour of `later`
/// against the contour of `earlier`, flux jump from one-sided samples of
/// earlier.mu. Requires later.time - earlier.time >= 10 tau. Throws when a
/// point has no counterpart within 5 h.
std::vector<StefanPoint> stefan_residual(const PFState& earlier, const PFState& later,
                                         const InterfacePolyline& poly_earlier,
                                         const InterfacePolyline& poly_later, double tau, double offset);

double max_abs_residual(const std::vector<GibbsThomsonPoint>& r);
double max_abs_residual(const std::vector<StefanPoint>& r);

void write_csv(const std::vector<GibbsThomsonPoint>& r, const std::string& path);
void write_csv(const std::vector<StefanPoint>& r, const std::string& path);

}  // namespace larche
