#pragma once

#include <string>
#include <vector>

namespace larche {

struct Interval {
  double lo = -1.5;
  double hi = 1.5;
};

enum class WellKind { quartic, custom_polynomial };

/// Polynomial double-well potential F with f = F', f' = F'', f'' = F'''.
/// Coefficients are stored in ascending powers of c.
class DoubleWell {
 public:
  /// F(c) = (1 - c^2)^2.
  static DoubleWell quartic(double C0 = 0.0);
  static DoubleWell polynomial(std::vector<double> coefficients, double C0 = 0.0,
                               Interval range_hint = {});

  WellKind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coeffs_[0]; }
  /// Coefficients of the deriv-th derivative, ascending powers.
  const std::vector<double>& derivative_coefficients(int deriv) const;
  double C0() const { return C0_; }
  Interval range_hint() const { return range_; }

  /// deriv = 0: F, 1: f, 2: f', 3: f''. Throws std::invalid_argument otherwise.
  double evaluate(double c, int deriv) const;
  double F(double c) const { return evaluate(c, 0); }
  double f(double c) const { return evaluate(c, 1); }
  double fp(double c) const { return evaluate(c, 2); }
  double fpp(double c) const { return evaluate(c, 3); }

  /// Whether f(-c) = -f(c) holds (even F), checked on the coefficients.
  bool is_symmetric(double tol = 1e-14) const;

  /// Roots of f inside range_hint, located by sign changes on a fine sample
  /// grid and refined by bisection.
  std::vector<double> roots_of_f(int samples = 20000) const;

 private:
  DoubleWell(WellKind kind, std::vector<double> coeffs, double C0, Interval range);

  WellKind kind_;
  std::vector<double> coeffs_[4];
  double C0_;
  Interval range_;
};

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  double worst_sample = 0.0;  ///< location of the worst sample
  double worst_value = 0.0;   ///< value of the checked quantity there
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const;
  /// Throws std::out_of_range if no check carries this name.
  const AssumptionCheck& find(const std::string& name) const;
};

// Check names used in ValidationReport.
inline constexpr const char* kMinimumAtWells = "minimum-at-pm1";
inline constexpr const char* kSlopesAtWells = "f-roots-positive-slope";
inline constexpr const char* kEqualWellIntegrals = "equal-positive-well-integrals";
inline constexpr const char* kConvexAtInfinity = "convex-beyond-C0";

/// Validates the structural assumptions on the well by sampling. samples >= 100.
ValidationReport validate(const DoubleWell& potential, int samples);

}  // namespace larche
