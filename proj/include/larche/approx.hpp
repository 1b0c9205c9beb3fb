#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "larche/geometry.hpp"
#include "larche/phasefield.hpp"
#include "larche/profile.hpp"
#include "larche/sharpref.hpp"

namespace larche {

/// Sharp-interface fields on each side of the interface, extended smoothly
/// across it so they can be bridged inside the layer. Empty displacement
/// functions mean u = 0.
struct OuterFields {
  std::function<double(Vec2)> mu_plus;
  std::function<double(Vec2)> mu_minus;
  std::function<Vec2(Vec2)> u_plus;
  std::function<Vec2(Vec2)> u_minus;
};

/// mu = value on both sides, no displacement.
OuterFields constant_outer_fields(double mu);

/// mu = ref.mu_value; with elasticity, u+- are the outer (B r + D / r) and
/// inner (A r) closed forms around `center`, each continued past R.
OuterFields radial_outer_fields(const RadialReference& ref, Vec2 center);

enum class DisplacementModel {
  bridged,             ///< u_A bridged from u+- like mu_A
  radial_equilibrium,  ///< exact radial equilibrium of the smooth c_A (circles only)
};

struct BuildOptions {
  int order = 1;
  double epsilon = 0.04;
  double delta = 0.16;
  DisplacementModel displacement = DisplacementModel::bridged;
  /// Required for radial_equilibrium (isotropic tensor, dilatational eigenstrain).
  std::optional<ElasticSetup> elasticity;
  /// Clamping radius of the radial equilibrium; 0 picks 1.01 x the farthest corner.
  double Rout = 0.0;
};

struct ApproxSolution {
  Field c;
  Field mu;
  VectorField u;
  int order = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  Shape shape;
  Field distance;    ///< d at the nodes
  Field p;           ///< Laplacian of d at the projection (= 1/R on a circle)
  Field zeta;        ///< cutoff(d / delta)
};

/// c_A as in init_glued, mu_A = zeta [mu+ eta(z) + mu- (1 - eta(z))] + (1 - zeta) mu+-
/// by side, u_A per the displacement model. Preconditions of init_glued apply;
/// throws std::invalid_argument for order outside {0, 1}, missing mu fields,
/// or radial_equilibrium without an isotropic dilatational setup on a circle.
ApproxSolution build(const Grid2D& g, const Shape& shape, const BuildOptions& opt, const Profiles& profiles,
                     const OuterFields& outer);

struct ResidualNorms {
  double r_l2 = 0.0, r_max = 0.0;
  double s_l2 = 0.0, s_max = 0.0;
  double mass_l2 = 0.0, mass_max = 0.0;
};

struct Residuals {
  Field r_A;           ///< mu_A + eps Delta_h c_A - f(c_A) / eps - W_c
  VectorField s_A;     ///< discrete div S (zero on boundary rows)
  Field mass_defect;   ///< Delta_h mu_A (d c_A / dt = 0 for stationary builds)
  ResidualNorms norms;
};

Residuals residuals(const ApproxSolution& a, const DoubleWell& potential,
                    const std::optional<ElasticSetup>& elasticity,
                    LaplacianKind laplacian = LaplacianKind::five_point);

struct StructureReport {
  double C_star = 0.0;
  double sup_p = 0.0;           ///< sup |p| over the tube
  double sup_q_weighted = 0.0;  ///< sup eps / (eps + |d|) |q|
  double sup_tangential = 0.0;  ///< sup |tangential gradient of c_A| over the tube
  double min_fprime_outer = 0.0;
  double min_signed_outer = 0.0;  ///< min of +phi+ and -phi- (must be > 0)
  double geometry_proxy = 0.0;    ///< max |kappa| + max |kappa'| of the shape, metadata only
  bool passed = false;
};

/// Audits the admissible form of an order-1 build against a single constant:
/// c = zeta (theta0 + eps p theta1 + eps^2 q) + (1 - zeta) phi+- with
/// phi+- = +-1 + eps p theta1(+-inf); the tube is |d| < 2 delta.
StructureReport structure_check(const ApproxSolution& a, const Profiles& profiles, const DoubleWell& potential,
                                double C_star);

struct RateFit {
  double order = 0.0;
  double constant = 0.0;
};

/// Least-squares fit of log(error) = log(constant) + order log(eps). Needs
/// >= 3 points, strictly decreasing positive eps and positive errors.
RateFit rate_fit(const std::vector<double>& epsilons, const std::vector<double>& errors);

}  // namespace larche
