#include "larche/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace larche {
namespace {

constexpr double kGaussX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
constexpr double kGaussW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};

// Composite 5-point Gauss-Legendre on [a, b].
template <class Fn>
double gauss(Fn&& fn, double a, double b, int panels) {
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double m = a + (p + 0.5) * w;
    for (int q = 0; q < 5; ++q) s += kGaussW[q] * fn(m + 0.5 * w * kGaussX[q]);
  }
  return 0.5 * w * s;
}

int node_count(double Z, double h) {
  if (!(Z > 0.0) || !(h > 0.0)) throw std::invalid_argument("profile: Z and h must be positive");
  const double r = Z / h;
  const long n = std::lround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-9 * r)
    throw std::invalid_argument("profile: Z/h must be an integer");
  return static_cast<int>(n);
}

double d2_5pt(const std::vector<double>& y, int k, double h) {
  return (-y[k + 2] + 16.0 * y[k + 1] - 30.0 * y[k] + 16.0 * y[k - 1] - y[k - 2]) / (12.0 * h * h);
}

// Five-point first-derivative weights (x12h) at offsets 0..4 of the stencil.
constexpr double kD1[5][5] = {{-25, 48, -36, 16, -3},
                              {-3, -10, 18, -6, 1},
                              {1, -8, 0, 8, -1},
                              {-1, 6, -18, 10, 3},
                              {3, -16, 36, -48, 25}};

// Fourth-order first derivative using only nodes lo..hi.
double d1_4th(const std::vector<double>& y, int k, int lo, int hi, double h) {
  int b = k - 2;
  if (b < lo) b = lo;
  if (b + 4 > hi) b = hi - 4;
  double v = 0.0;
  for (int q = 0; q < 5; ++q) v += kD1[k - b][q] * y[b + q];
  return v / (12.0 * h);
}

// Numerov for y'' = q y + r on nodes 0..N (step h), y(0) = y0, y(N) = yN.
std::vector<double> numerov(const std::vector<double>& q, const std::vector<double>& r, double h,
                            double y0, double yN) {
  const int N = static_cast<int>(q.size()) - 1;
  const double c = h * h / 12.0;
  std::vector<double> y(N + 1, 0.0);
  y[0] = y0;
  y[N] = yN;
  const int m = N - 1;
  std::vector<double> lo(m), di(m), up(m), rhs(m);
  for (int k = 1; k <= N - 1; ++k) {
    const int e = k - 1;
    lo[e] = 1.0 - c * q[k - 1];
    di[e] = -2.0 * (1.0 + 5.0 * c * q[k]);
    up[e] = 1.0 - c * q[k + 1];
    rhs[e] = c * (r[k + 1] + 10.0 * r[k] + r[k - 1]);
  }
  rhs[0] -= lo[0] * y0;
  rhs[m - 1] -= up[m - 1] * yN;
  for (int e = 1; e < m; ++e) {
    if (di[e - 1] == 0.0) throw std::runtime_error("solve_theta1: singular tridiagonal system");
    const double w = lo[e] / di[e - 1];
    di[e] -= w * up[e - 1];
    rhs[e] -= w * rhs[e - 1];
  }
  if (di[m - 1] == 0.0) throw std::runtime_error("solve_theta1: singular tridiagonal system");
  y[m] = rhs[m - 1] / di[m - 1];
  for (int e = m - 2; e >= 0; --e) y[e + 1] = (rhs[e] - up[e] * y[e + 2]) / di[e];
  for (double v : y)
    if (!std::isfinite(v)) throw std::runtime_error("solve_theta1: non-finite solution");
  return y;
}

using Poly = std::vector<double>;

Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

void add_into(std::array<double, 8>& out, const Poly& p, double s) {
  for (std::size_t k = 0; k < p.size(); ++k) out[k] += s * p[k];
}

// Divides F by (1 - c^2)^2 = 1 - 2c^2 + c^4; the remainder must vanish.
Poly deflate_double_wells(const Poly& F) {
  if (F.size() < 5) throw std::invalid_argument("solve_theta0: F must have double roots at +-1");
  Poly rem = F;
  const int nq = static_cast<int>(F.size()) - 4;
  Poly q(nq, 0.0);
  for (int k = nq - 1; k >= 0; --k) {
    const double lead = rem[k + 4];
    q[k] = lead;
    rem[k + 4] -= lead;
    rem[k + 2] += 2.0 * lead;
    rem[k] -= lead;
  }
  double scale = 0.0;
  for (double v : F) scale = std::max(scale, std::abs(v));
  for (int k = 0; k < 4; ++k)
    if (std::abs(rem[k]) > 1e-10 * scale)
      throw std::invalid_argument("solve_theta0: F must have double roots at +-1");
  return q;
}

}  // namespace

bool ProfileTable::same_grid(const ProfileTable& o) const {
  return size() == o.size() && std::abs(step - o.step) <= 1e-15 * step &&
         std::abs(half_width - o.half_width) <= 1e-12 * half_width;
}

template <int D>
double ProfileTable::eval(double zz) const {
  const int n = size();
  if (zz >= half_width || zz <= -half_width) {
    const bool plus = zz > 0;
    const double lim = plus ? limit_plus : limit_minus;
    const double edge = plus ? values[n - 1] : values[0];
    const double r = plus ? tail_rate_plus : tail_rate_minus;
    const double t = std::abs(zz) - half_width;
    const double a = (edge - lim) * std::exp(-r * t);
    if constexpr (D == 0) return lim + a;
    if constexpr (D == 1) return plus ? -r * a : r * a;
    return r * r * a;
  }
  double s = (zz + half_width) / step;
  int k = static_cast<int>(s);
  if (k >= n - 1) k = n - 2;
  const double t = s - k;
  const double h = step;
  const double y0 = values[k], y1 = values[k + 1];
  const double p0 = h * derivative[k], p1 = h * derivative[k + 1];
  const double s0 = h * h * second[k], s1 = h * h * second[k + 1];
  const double a0 = y0, a1 = p0, a2 = 0.5 * s0;
  const double a3 = -10.0 * y0 - 6.0 * p0 - 1.5 * s0 + 0.5 * s1 - 4.0 * p1 + 10.0 * y1;
  const double a4 = 15.0 * y0 + 8.0 * p0 + 1.5 * s0 - s1 + 7.0 * p1 - 15.0 * y1;
  const double a5 = -6.0 * y0 - 3.0 * p0 - 0.5 * s0 + 0.5 * s1 - 3.0 * p1 + 6.0 * y1;
  if constexpr (D == 0) return a0 + t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))));
  if constexpr (D == 1)
    return (a1 + t * (2.0 * a2 + t * (3.0 * a3 + t * (4.0 * a4 + t * 5.0 * a5)))) / h;
  return (2.0 * a2 + t * (6.0 * a3 + t * (12.0 * a4 + t * 20.0 * a5))) / (h * h);
}

double ProfileTable::at(double zz) const { return eval<0>(zz); }
double ProfileTable::d1(double zz) const { return eval<1>(zz); }
double ProfileTable::d2(double zz) const { return eval<2>(zz); }

double ProfileTable::inverse(double v) const {
  if (std::isnan(v)) throw std::invalid_argument("ProfileTable::inverse: NaN");
  const int n = size();
  const double zmax = 2.0 * half_width;
  if (v >= limit_plus) return zmax;
  if (v <= limit_minus) return -zmax;
  if (v > values[n - 1]) {
    const double z = half_width + std::log((values[n - 1] - limit_plus) / (v - limit_plus)) / tail_rate_plus;
    return std::min(z, zmax);
  }
  if (v < values[0]) {
    const double z = -half_width - std::log((values[0] - limit_minus) / (v - limit_minus)) / tail_rate_minus;
    return std::max(z, -zmax);
  }
  const auto it = std::upper_bound(values.begin(), values.end(), v);
  int k = static_cast<int>(it - values.begin()) - 1;
  k = std::clamp(k, 0, n - 2);
  double lo = z(k), hi = z(k + 1), zz = 0.5 * (lo + hi);
  for (int iter = 0; iter < 60; ++iter) {
    const double r = at(zz) - v;
    if (r == 0.0) break;
    (r > 0 ? hi : lo) = zz;
    const double d = d1(zz);
    double next = d > 0 ? zz - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - zz) < 1e-15 * (1.0 + std::abs(zz))) {
      zz = next;
      break;
    }
    zz = next;
  }
  return zz;
}

ProfileTable solve_theta0(const DoubleWell& potential, double Z, double h) {
  if (Z < 8.0) throw std::invalid_argument("solve_theta0: Z must be >= 8");
  if (h > 0.01) throw std::invalid_argument("solve_theta0: h must be <= 0.01");
  const int N = node_count(Z, h);
  if (!validate(potential, 1000).all_passed())
    throw std::invalid_argument("solve_theta0: potential fails validation");
  for (int k = 1; k < 2000; ++k) {
    const double c = -1.0 + 2.0 * k / 2000.0;
    if (!(potential.F(c) > 0.0))
      throw std::invalid_argument("solve_theta0: degenerate well, F <= 0 at c = " + std::to_string(c));
  }

  // F = (1 - c^2)^2 G(c); evaluating through G keeps relative accuracy near +-1.
  const Poly G = deflate_double_wells(potential.coefficients());
  auto g = [&](double th) {
    double p = 0.0;
    for (auto it = G.rbegin(); it != G.rend(); ++it) p = p * th + *it;
    return std::abs(1.0 - th * th) * std::sqrt(std::max(0.0, 2.0 * p));
  };
  ProfileTable t;
  t.half_width = N * h;
  t.step = h;
  t.values.assign(2 * N + 1, 0.0);
  constexpr int sub = 8;
  for (int dir : {1, -1}) {
    double th = 0.0;
    const double dz = dir * h / sub;
    for (int k = 1; k <= N; ++k) {
      for (int s = 0; s < sub; ++s) {
        const double k1 = g(th);
        const double k2 = g(th + 0.5 * dz * k1);
        const double k3 = g(th + 0.5 * dz * k2);
        const double k4 = g(th + dz * k3);
        th += dz * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      }
      t.values[N + dir * k] = th;
    }
  }
  const int n = 2 * N + 1;
  t.derivative.resize(n);
  t.second.resize(n);
  for (int k = 0; k < n; ++k) {
    t.derivative[k] = g(t.values[k]);
    t.second[k] = potential.f(t.values[k]);
  }
  for (int k = 0; k + 1 < n; ++k) {
    const double a = t.values[k], b = t.values[k + 1];
    if (b < a || (b == a && std::abs(a) < 1.0 - 1e-13))
      throw std::runtime_error("solve_theta0: profile not monotone at z = " + std::to_string(t.z(k)));
  }
  t.limit_minus = -1.0;
  t.limit_plus = 1.0;
  t.tail_rate_minus = std::sqrt(potential.fp(-1.0));
  t.tail_rate_plus = std::sqrt(potential.fp(1.0));
  const double amax = std::min(t.tail_rate_minus, t.tail_rate_plus);
  const double fit = std::min(fit_decay_rate(t, 4.0, 1), fit_decay_rate(t, 4.0, -1));
  t.decay_alpha = std::min(fit, 0.99 * amax);
  return t;
}

SigmaValue sigma(const ProfileTable& theta0) {
  const int n = theta0.size();
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    s += w * theta0.derivative[k] * theta0.derivative[k];
  }
  SigmaValue out;
  out.value = 0.5 * theta0.step * s;
  const double dl = theta0.derivative[0], dr = theta0.derivative[n - 1];
  out.tail_bound = dl * dl / (4.0 * theta0.tail_rate_minus) + dr * dr / (4.0 * theta0.tail_rate_plus);
  return out;
}

double fit_decay_rate(const ProfileTable& table, double zmin, int side) {
  const double lim = side > 0 ? table.limit_plus : table.limit_minus;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = 0; k < table.size(); ++k) {
    const double zz = table.z(k) * side;
    if (zz < zmin) continue;
    const double e = std::abs(table.values[k] - lim);
    if (e < 1e-13) continue;
    const double y = std::log(e);
    sx += zz;
    sy += y;
    sxx += zz * zz;
    sxy += zz * y;
    ++m;
  }
  if (m < 3) throw std::runtime_error("fit_decay_rate: too few samples above round-off");
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double BridgingFunction::operator()(double z) const {
  if (z <= -1.0) return 0.0;
  if (z >= 1.0) return 1.0;
  double p = 0.0;
  for (int k = 7; k >= 0; --k) p = p * z + coeffs[k];
  return p;
}

double BridgingFunction::derivative(double z) const {
  if (z <= -1.0 || z >= 1.0) return 0.0;
  double p = 0.0;
  for (int k = 7; k >= 1; --k) p = p * z + k * coeffs[k];
  return p;
}

std::array<double, 2> eta_moments(const BridgingFunction& eta, const ProfileTable& theta0) {
  const double inner1 = gauss([&](double z) { return (eta(z) - 0.5) * theta0.d1(z); }, -1.0, 1.0, 200);
  const double tails = 0.5 * (theta0.limit_plus - theta0.at(1.0)) -
                       0.5 * (theta0.at(-1.0) - theta0.limit_minus);
  const double m2 = gauss([&](double z) { return z * eta.derivative(z) * theta0.d1(z); }, -1.0, 1.0, 200);
  return {inner1 + tails, m2};
}

BridgingFunction make_eta(const DoubleWell& potential, const ProfileTable& theta0) {
  BridgingFunction eta;
  // t = (z+1)/2, smoothstep 6t^5 - 15t^4 + 10t^3
  const Poly t{0.5, 0.5};
  const Poly t3 = mul(mul(t, t), t);
  const Poly t4 = mul(t3, t);
  const Poly t5 = mul(t4, t);
  add_into(eta.coeffs, t5, 6.0);
  add_into(eta.coeffs, t4, -15.0);
  add_into(eta.coeffs, t3, 10.0);

  if (!potential.is_symmetric()) {
    const Poly one_m{1.0, 0.0, -1.0};
    const Poly P = mul(mul(one_m, one_m), one_m);
    const Poly Q = mul(Poly{0.0, 1.0}, P);
    BridgingFunction bp, bq;
    add_into(bp.coeffs, P, 1.0);
    add_into(bq.coeffs, Q, 1.0);
    // Moments are affine in (a, b); the correction terms vanish outside [-1, 1].
    const auto m0 = eta_moments(eta, theta0);
    const double p1 = gauss([&](double z) { return bp(z) * theta0.d1(z); }, -1.0, 1.0, 200);
    const double q1 = gauss([&](double z) { return bq(z) * theta0.d1(z); }, -1.0, 1.0, 200);
    const double p2 = gauss([&](double z) { return z * bp.derivative(z) * theta0.d1(z); }, -1.0, 1.0, 200);
    const double q2 = gauss([&](double z) { return z * bq.derivative(z) * theta0.d1(z); }, -1.0, 1.0, 200);
    const double det = p1 * q2 - q1 * p2;
    if (std::abs(det) < 1e-14) throw std::runtime_error("make_eta: singular moment correction");
    eta.correction_a = (-m0[0] * q2 + q1 * m0[1]) / det;
    eta.correction_b = (-p1 * m0[1] + p2 * m0[0]) / det;
    add_into(eta.coeffs, P, eta.correction_a);
    add_into(eta.coeffs, Q, eta.correction_b);
    for (int k = 0; k <= 4000; ++k) {
      const double z = -1.0 + 2.0 * k / 4000.0;
      if (eta.derivative(z) < -1e-14)
        throw std::runtime_error("make_eta: moment correction breaks monotonicity at z = " +
                                 std::to_string(z));
    }
  }
  const auto m = eta_moments(eta, theta0);
  eta.moment_defect = {std::abs(m[0]), std::abs(m[1])};
  eta.eta0 = 0.5 * gauss([&](double z) { return eta.derivative(z) * theta0.d1(z); }, -1.0, 1.0, 200);
  return eta;
}

ProfileTable solve_theta1(const DoubleWell& potential, const ProfileTable& theta0, double sig) {
  const int n = theta0.size();
  const int N = theta0.center();
  const double h = theta0.step;
  ProfileTable t;
  t.half_width = theta0.half_width;
  t.step = h;
  t.limit_minus = -sig / potential.fp(theta0.limit_minus);
  t.limit_plus = -sig / potential.fp(theta0.limit_plus);
  t.tail_rate_minus = theta0.tail_rate_minus;
  t.tail_rate_plus = theta0.tail_rate_plus;
  t.values.assign(n, 0.0);

  std::vector<double> q(N + 1), r(N + 1);
  for (int side : {1, -1}) {
    for (int k = 0; k <= N; ++k) {
      const int idx = N + side * k;
      q[k] = potential.fp(theta0.values[idx]);
      r[k] = sig - theta0.derivative[idx];
    }
    const auto y = numerov(q, r, h, 0.0, side > 0 ? t.limit_plus : t.limit_minus);
    for (int k = 0; k <= N; ++k) t.values[N + side * k] = y[k];
  }

  t.derivative.resize(n);
  t.second.resize(n);
  for (int k = 0; k < n; ++k) {
    if (k < N) {
      t.derivative[k] = d1_4th(t.values, k, 0, N, h);
    } else if (k > N) {
      t.derivative[k] = d1_4th(t.values, k, N, n - 1, h);
    } else {
      const double left = d1_4th(t.values, k, 0, N, h);
      const double right = d1_4th(t.values, k, N, n - 1, h);
      t.derivative[k] = 0.5 * (left + right);
      t.derivative_jump_at_0 = right - left;
    }
    t.second[k] = potential.fp(theta0.values[k]) * t.values[k] + sig - theta0.derivative[k];
  }
  const double amax = std::min(t.tail_rate_minus, t.tail_rate_plus);
  t.decay_alpha = 0.99 * amax;
  return t;
}

double check_orthogonality(const DoubleWell& potential, const ProfileTable& theta0,
                           const ProfileTable& theta1) {
  if (!theta0.same_grid(theta1)) throw std::invalid_argument("check_orthogonality: grid mismatch");
  const int n = theta0.size();
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    const double d = theta0.derivative[k];
    s += w * theta1.values[k] * d * d * potential.fpp(theta0.values[k]);
  }
  return s * theta0.step;
}

double theta0_residual(const DoubleWell& potential, const ProfileTable& theta0) {
  double worst = 0.0;
  for (int k = 2; k + 2 < theta0.size(); ++k) {
    const double res = d2_5pt(theta0.values, k, theta0.step) - potential.f(theta0.values[k]);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double theta1_residual(const DoubleWell& potential, const ProfileTable& theta0,
                       const ProfileTable& theta1, double sig) {
  if (!theta0.same_grid(theta1)) throw std::invalid_argument("theta1_residual: grid mismatch");
  double worst = 0.0;
  for (int k = 2; k + 2 < theta1.size(); ++k) {
    const double rhs = potential.fp(theta0.values[k]) * theta1.values[k] + sig - theta0.derivative[k];
    worst = std::max(worst, std::abs(d2_5pt(theta1.values, k, theta1.step) - rhs));
  }
  return worst;
}

Profiles make_profiles(const DoubleWell& potential, double Z, double h) {
  Profiles p;
  p.theta0 = solve_theta0(potential, Z, h);
  p.sigma = sigma(p.theta0).value;
  p.theta1 = solve_theta1(potential, p.theta0, p.sigma);
  p.eta = make_eta(potential, p.theta0);
  return p;
}

}  // namespace larche
