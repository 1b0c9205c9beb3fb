#pragma once

#include <array>
#include <vector>

#include "larche/potential.hpp"

namespace larche {

/// Tabulated 1D profile on z in [-Z, Z] with nodes z_k = -Z + k h.
/// Stores value, first and second derivative so that at() is a C2 quintic
/// Hermite interpolant. Outside the table the far-field tail
/// limit + (edge - limit) exp(-rate |z - Z|) is used.
struct ProfileTable {
  double half_width = 0.0;
  double step = 0.0;
  std::vector<double> values;
  std::vector<double> derivative;
  std::vector<double> second;
  double limit_minus = 0.0;
  double limit_plus = 0.0;
  double decay_alpha = 0.0;
  /// Tail rates used for extrapolation beyond +-Z.
  double tail_rate_minus = 1.0;
  double tail_rate_plus = 1.0;
  /// For theta1: jump of the one-sided derivatives at z = 0 (solvability diagnostic).
  double derivative_jump_at_0 = 0.0;

  int size() const { return static_cast<int>(values.size()); }
  int center() const { return (size() - 1) / 2; }
  double z(int k) const { return -half_width + k * step; }
  bool same_grid(const ProfileTable& o) const;

  double at(double z) const;
  double d1(double z) const;
  double d2(double z) const;
  /// z with at(z) = v for an increasing table; clamped to +-2Z beyond the limits.
  /// Throws std::invalid_argument for NaN.
  double inverse(double v) const;

 private:
  template <int D>
  double eval(double z) const;
};

/// theta0 from the first integral theta' = sqrt(2 F(theta)), theta(0) = 0, by
/// RK4 in z in both directions. Requires Z >= 8, h <= 0.01, Z/h integral.
ProfileTable solve_theta0(const DoubleWell& potential, double Z, double h);

struct SigmaValue {
  double value = 0.0;       ///< 1/2 int (theta0')^2 over [-Z, Z]
  double tail_bound = 0.0;  ///< bound on the neglected tails
};

SigmaValue sigma(const ProfileTable& theta0);

/// Least-squares slope of -log|theta(z) - limit| over z in [zmin, Z] on the
/// given side (+1 or -1); samples below 1e-13 are skipped.
double fit_decay_rate(const ProfileTable& table, double zmin, int side);

/// Bridging function: eta(z) = 0 for z <= -1, 1 for z >= 1, a degree-7
/// polynomial in between (quintic smoothstep plus an optional correction
/// a (1-z^2)^3 + b z (1-z^2)^3 that zeroes both moments).
struct BridgingFunction {
  std::array<double, 8> coeffs{};  ///< ascending powers of z on [-1, 1]
  std::array<double, 2> moment_defect{};
  double correction_a = 0.0;
  double correction_b = 0.0;
  double eta0 = 0.0;  ///< 1/2 int eta' theta0'

  double operator()(double z) const;
  double derivative(double z) const;
};

/// Moments (int (eta - 1/2) theta0', int z eta' theta0') over the real line.
std::array<double, 2> eta_moments(const BridgingFunction& eta, const ProfileTable& theta0);

BridgingFunction make_eta(const DoubleWell& potential, const ProfileTable& theta0);

/// theta1'' - f'(theta0) theta1 = sigma - theta0', theta1(0) = 0, bounded.
/// Solved with Numerov on [0, Z] and [-Z, 0] with the far-field constants
/// -sigma / f'(+-1) at the ends.
ProfileTable solve_theta1(const DoubleWell& potential, const ProfileTable& theta0, double sigma);

/// int theta1 (theta0')^2 f''(theta0) dz. Throws if the grids differ.
double check_orthogonality(const DoubleWell& potential, const ProfileTable& theta0,
                           const ProfileTable& theta1);

/// Max over interior nodes of |D4 theta0 - f(theta0)|, D4 the 5-point
/// fourth-order second difference of the stored values.
double theta0_residual(const DoubleWell& potential, const ProfileTable& theta0);
/// Same for |D4 theta1 - f'(theta0) theta1 - (sigma - theta0')|.
double theta1_residual(const DoubleWell& potential, const ProfileTable& theta0,
                       const ProfileTable& theta1, double sigma);

/// Everything the expansion needs, computed once.
struct Profiles {
  ProfileTable theta0;
  ProfileTable theta1;
  double sigma = 0.0;
  BridgingFunction eta;
};

Profiles make_profiles(const DoubleWell& potential, double Z = 12.0, double h = 0.005);

}  // namespace larche
