#include "larche/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace larche {
namespace {

std::vector<double> differentiate(const std::vector<double>& a) {
  if (a.size() <= 1) return {0.0};
  std::vector<double> d(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) d[k - 1] = static_cast<double>(k) * a[k];
  return d;
}

double horner(const std::vector<double>& a, double x) {
  double p = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) p = p * x + *it;
  return p;
}

}  // namespace

DoubleWell::DoubleWell(WellKind kind, std::vector<double> coeffs, double C0, Interval range)
    : kind_(kind), C0_(C0), range_(range) {
  if (coeffs.empty()) throw std::invalid_argument("DoubleWell: empty coefficient list");
  for (double v : coeffs)
    if (!std::isfinite(v)) throw std::invalid_argument("DoubleWell: non-finite coefficient");
  if (C0 < 0.0) throw std::invalid_argument("DoubleWell: C0 must be >= 0");
  if (!(range.lo < -1.0 && range.hi > 1.0))
    throw std::invalid_argument("DoubleWell: range_hint must contain [-1, 1] in its interior");
  coeffs_[0] = std::move(coeffs);
  for (int d = 1; d < 4; ++d) coeffs_[d] = differentiate(coeffs_[d - 1]);
}

DoubleWell DoubleWell::quartic(double C0) {
  return DoubleWell(WellKind::quartic, {1.0, 0.0, -2.0, 0.0, 1.0}, C0, Interval{-1.5, 1.5});
}

DoubleWell DoubleWell::polynomial(std::vector<double> coefficients, double C0, Interval range_hint) {
  return DoubleWell(WellKind::custom_polynomial, std::move(coefficients), C0, range_hint);
}

const std::vector<double>& DoubleWell::derivative_coefficients(int deriv) const {
  if (deriv < 0 || deriv > 3) throw std::invalid_argument("DoubleWell: deriv must be in 0..3");
  return coeffs_[deriv];
}

double DoubleWell::evaluate(double c, int deriv) const {
  return horner(derivative_coefficients(deriv), c);
}

bool DoubleWell::is_symmetric(double tol) const {
  for (std::size_t k = 1; k < coeffs_[0].size(); k += 2)
    if (std::abs(coeffs_[0][k]) > tol) return false;
  return true;
}

std::vector<double> DoubleWell::roots_of_f(int samples) const {
  std::vector<double> roots;
  const double lo = range_.lo, hi = range_.hi;
  const double step = (hi - lo) / samples;
  double xa = lo, fa = f(xa);
  for (int k = 1; k <= samples; ++k) {
    const double xb = lo + k * step;
    const double fb = f(xb);
    if (fa == 0.0) {
      roots.push_back(xa);
    } else if (fa * fb < 0.0) {
      double a = xa, b = xb, va = fa;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double vm = f(m);
        if (vm == 0.0) {
          a = b = m;
          break;
        }
        if ((vm < 0) == (va < 0)) {
          a = m;
          va = vm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    xa = xb;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(xa);
  return roots;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck& ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("ValidationReport: no check named " + name);
}

ValidationReport validate(const DoubleWell& potential, int samples) {
  if (samples < 100) throw std::invalid_argument("validate: samples must be >= 100");
  const double tolF = potential.kind() == WellKind::quartic ? 0.0 : 1e-12;
  const Interval r = potential.range_hint();
  ValidationReport report;

  {
    // F(+-1) = 0 and F >= 0 on the sampled range.
    AssumptionCheck c{kMinimumAtWells};
    const double fm = potential.F(-1.0), fp = potential.F(1.0);
    c.worst_sample = std::abs(fm) >= std::abs(fp) ? -1.0 : 1.0;
    c.worst_value = std::max(std::abs(fm), std::abs(fp));
    c.passed = c.worst_value <= tolF;
    for (int k = 0; k <= samples; ++k) {
      const double x = r.lo + (r.hi - r.lo) * k / samples;
      const double v = potential.F(x);
      if (v < -1e-12 && (c.passed || v < c.worst_value)) {
        c.passed = false;
        c.worst_sample = x;
        c.worst_value = v;
      }
    }
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{kSlopesAtWells};
    c.worst_sample = -1.0;
    c.worst_value = potential.fp(-1.0);
    for (double s : {-1.0, 1.0}) {
      const double slope = potential.fp(s);
      if (std::abs(potential.f(s)) > 1e-10 || !(slope > 0.0)) {
        c.passed = false;
        c.worst_sample = s;
        c.worst_value = std::abs(potential.f(s)) > 1e-10 ? potential.f(s) : slope;
      } else if (slope < c.worst_value) {
        c.worst_sample = s;
        c.worst_value = slope;
      }
    }
    report.checks.push_back(c);
  }
  {
    // int_{-1}^u f = F(u) - F(-1) and int_{1}^u f = F(u) - F(1): equal and positive.
    AssumptionCheck c{kEqualWellIntegrals};
    c.worst_value = INFINITY;
    for (int k = 1; k < samples; ++k) {
      const double u = -1.0 + 2.0 * k / samples;
      const double left = potential.F(u) - potential.F(-1.0);
      const double right = potential.F(u) - potential.F(1.0);
      const double score = std::min(left, right) - std::abs(left - right) * 1e12;
      if (score < c.worst_value) {
        c.worst_value = std::min(left, right);
        c.worst_sample = u;
      }
      if (!(left > 0.0 && right > 0.0) || std::abs(left - right) > 1e-12) {
        if (c.passed) {
          c.worst_sample = u;
          c.worst_value = std::abs(left - right) > 1e-12 ? left - right : std::min(left, right);
        }
        c.passed = false;
      }
    }
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{kConvexAtInfinity};
    c.worst_value = INFINITY;
    for (int k = 0; k <= samples; ++k) {
      const double x = r.lo + (r.hi - r.lo) * k / samples;
      if (std::abs(x) < potential.C0()) continue;
      const double v = x * potential.fpp(x);
      if (v < c.worst_value) {
        c.worst_value = v;
        c.worst_sample = x;
      }
      if (v < 0.0) c.passed = false;
    }
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace larche
