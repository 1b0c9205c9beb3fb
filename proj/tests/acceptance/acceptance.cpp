// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [criterion ...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "larche/approx.hpp"
#include "larche/elastic_solver.hpp"
#include "larche/experiments.hpp"
#include "larche/spectral.hpp"

using namespace larche;

namespace {

using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kTheta0Tol = 1e-8;
constexpr double kSigmaTol = 1e-7;
constexpr double kTheta1ResidualTol = 1e-7;
constexpr double kOrthogonalityTol = 1e-7;
constexpr double kEtaMomentTol = 1e-10;
constexpr double kMassDriftTol = 1e-11;
constexpr double kEnergySlack = 1e-10;
constexpr double kManufacturedOrder = 1.8;
constexpr double kRadialRelTol = 1e-3;
constexpr double kGibbsThomsonOrder = 0.8;
constexpr double kGibbsThomsonFraction = 0.15;
constexpr double kElasticFraction = 0.20;
constexpr double kVelocityFactor = 0.05;
constexpr double kCalibrationTol = 0.02;
constexpr double kSharpLimitOrder = 0.8;
constexpr double kResidualRatioOrder = 0.8;
constexpr double kStressOrder = 1.8;
constexpr double kUniformityRatio = 2.0;
constexpr double kCStar = 10.0;

const std::vector<double> kCircleEps{0.08, 0.04, 0.02};
const std::vector<double> kBuildEps{0.04, 0.02, 0.01};
const std::vector<double> kSpectralEps{0.1, 0.05, 0.025};
const RadialElasticParams kElastic{2.0, 1.0, 0.1};

int threads() {
  const char* env = std::getenv("LARCHE_THREADS");
  return env ? std::max(1, std::atoi(env)) : 1;
}

const Profiles& profiles() {
  static const Profiles p = make_profiles(DoubleWell::quartic());
  return p;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

bool report(int id, const Verdict& v, double secs, double budget) {
  const bool ok = v.pass && secs < budget;
  std::printf("criterion %d %s %s; runtime %.1f s (< %.0f s)\n", id, ok ? "PASS" : "FAIL", v.detail.c_str(), secs,
              budget);
  std::fflush(stdout);
  return ok;
}

// 1: profile identities
bool criterion1() {
  const auto t0 = Clock::now();
  const DoubleWell W = DoubleWell::quartic();
  const Profiles P = make_profiles(W);
  double e0 = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double z = -10.0 + 20.0 * k / 20000;
    e0 = std::max(e0, std::abs(P.theta0.at(z) - std::tanh(std::numbers::sqrt2 * z)));
  }
  const double sig = std::abs(P.sigma - 2.0 * std::numbers::sqrt2 / 3.0);
  const double r1 = theta1_residual(W, P.theta0, P.theta1, P.sigma);
  const double orth = std::abs(check_orthogonality(W, P.theta0, P.theta1));
  const auto m = eta_moments(P.eta, P.theta0);
  const double mom = std::max(std::abs(m[0]), std::abs(m[1]));
  Verdict v;
  v.require(e0 <= kTheta0Tol, fmt("|theta0 - tanh| = %.2e", e0));
  v.require(sig <= kSigmaTol, fmt("|sigma - 2sqrt2/3| = %.2e", sig));
  v.require(r1 <= kTheta1ResidualTol, fmt("theta1 residual = %.2e", r1));
  v.require(orth <= kOrthogonalityTol, fmt("orthogonality = %.2e", orth));
  v.require(mom <= kEtaMomentTol, fmt("eta moments = %.2e", mom));
  return report(1, v, seconds_since(t0), 1.0);
}

// 2: conservation and dissipation over 1e4 steps with elasticity
bool criterion2() {
  const auto t0 = Clock::now();
  const auto& P = profiles();
  const Grid2D g = Grid2D::square(128, 2.0);
  const double eps = 0.04;
  const Field c0 = init_glued(g, sdf(Shape::ellipse({1.0, 1.0}, 0.55, 0.3)), eps, 4 * eps, P.theta0, P.theta1, false);
  PFConfig cfg;
  cfg.epsilon = eps;
  cfg.elasticity = ElasticSetup{ElasticityTensor::isotropic(kElastic.lambda, kElastic.mu),
                                Eigenstrain::dilatational(kElastic.estar)};
  const long steps = 10000;
  cfg.end_time = steps * cfg.time_step();
  RunOptions opts;
  opts.diagnostics_every = 1;
  const Trajectory tr = run(g, cfg, DoubleWell::quartic(), c0, opts);
  double drift = 0.0, worst_rise = -1e300;
  for (std::size_t k = 0; k < tr.mass.size(); ++k) drift = std::max(drift, std::abs(tr.mass[k] - tr.mass[0]));
  for (std::size_t k = 1; k < tr.Etot.size(); ++k)
    worst_rise = std::max(worst_rise, (tr.Etot[k] - tr.Etot[k - 1]) / std::abs(tr.Etot[k - 1]));
  Verdict v;
  v.require(tr.Etot.size() == static_cast<std::size_t>(steps + 1), fmt("%.0f steps", double(tr.Etot.size() - 1)));
  v.require(drift <= kMassDriftTol, fmt("mass drift = %.2e", drift));
  v.require(worst_rise <= kEnergySlack, fmt("max relative energy rise per step = %.2e", worst_rise));
  v.detail += fmt("; E %.6f", tr.Etot.front()) + fmt(" -> %.6f", tr.Etot.back());
  return report(2, v, seconds_since(t0), 300.0);
}

// 3: elasticity manufactured solution and radial inclusion
bool criterion3() {
  const auto t0 = Clock::now();
  const auto C = ElasticityTensor::isotropic(1.0, 1.0);
  const auto E = Eigenstrain::dilatational(0.01);
  const double pi = std::numbers::pi;
  std::vector<double> hs, errs;
  for (int n : {33, 65, 129}) {
    const Grid2D g = Grid2D::square(n, 1.0);
    VectorField b(g);
    b.x = Field::from_function(g, [&](Vec2 p) { return 4.0 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); });
    b.y = Field::from_function(g, [&](Vec2 p) { return -2.0 * pi * pi * std::cos(pi * p.x) * std::cos(pi * p.y); });
    ElasticSolver s(g, C, E);
    const auto u = s.solve(Field(g, 0.0), 1e-12, &b);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec2 p = g.node(i, j);
        err = std::max({err, std::abs(u.x(i, j) - std::sin(pi * p.x) * std::sin(pi * p.y)), std::abs(u.y(i, j))});
      }
    hs.push_back(g.hx());
    errs.push_back(err);
  }
  const double order = rate_fit(hs, errs).order;

  const double R = 0.25, Ro = 0.75;
  const auto f = radial_solution(R, Ro, 1.0, 1.0, 0.01, -1.0, 1.0);
  const Grid2D g = Grid2D::square(256, 1.0);
  const Vec2 ctr{0.5, 0.5};
  const Field c = dual_cell_average(g, [&](Vec2 p) { return (p - ctr).norm() < R ? -1.0 : 1.0; });
  VectorField bd(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 u = f.u(g.node(i, j) - ctr);
      bd.x(i, j) = u.x;
      bd.y(i, j) = u.y;
    }
  ElasticSolver s(g, C, E);
  const auto u = s.solve(c, 1e-10, nullptr, &bd);
  double err = 0.0, ref = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double ex = u.x(i, j) - bd.x(i, j), ey = u.y(i, j) - bd.y(i, j);
      err += g.node_weight(i, j) * (ex * ex + ey * ey);
      ref += g.node_weight(i, j) * (bd.x(i, j) * bd.x(i, j) + bd.y(i, j) * bd.y(i, j));
    }
  const double rel = std::sqrt(err / ref);
  Verdict v;
  v.require(order >= kManufacturedOrder, fmt("manufactured order = %.3f", order));
  v.require(rel <= kRadialRelTol, fmt("radial relative L2 error (256^2) = %.2e", rel));
  return report(3, v, seconds_since(t0), 120.0);
}

// 4-6 share the circle runs.
struct CircleSweep {
  std::vector<CircleResult> plain;
  CircleResult elastic;
  double plain_seconds = 0.0, elastic_seconds = 0.0;
};

const CircleSweep& circle_sweep() {
  static const CircleSweep sweep = [] {
    CircleSweep s;
    auto t0 = Clock::now();
    for (double eps : kCircleEps) {
      CircleSetup c;
      c.epsilon = eps;
      s.plain.push_back(run_circle(c, profiles(), DoubleWell::quartic()));
      std::printf("  circle eps=%.3f n=%d steps=%ld: GT %.3e, V %.3e, err_mu %.3e, err_c %.3e (%.1f s)\n", eps,
                  s.plain.back().n, s.plain.back().steps, s.plain.back().gt_residual, s.plain.back().velocity,
                  s.plain.back().err_mu, s.plain.back().err_c, s.plain.back().wall_seconds);
      std::fflush(stdout);
    }
    s.plain_seconds = seconds_since(t0);
    t0 = Clock::now();
    CircleSetup c;
    c.epsilon = kCircleEps.back();
    c.elasticity = kElastic;
    s.elastic = run_circle(c, profiles(), DoubleWell::quartic());
    s.elastic_seconds = seconds_since(t0);
    std::printf("  elastic circle eps=%.3f: mu error %.3e vs |mu_ref| %.4f (%.1f s)\n", c.epsilon,
                s.elastic.mu_ref_error, std::abs(s.elastic.mu_ref), s.elastic_seconds);
    std::fflush(stdout);
    return s;
  }();
  return sweep;
}

std::vector<double> collect(const std::vector<CircleResult>& r, double CircleResult::*m) {
  std::vector<double> out;
  for (const auto& x : r) out.push_back(x.*m);
  return out;
}

bool criterion4() {
  const auto& s = circle_sweep();
  const auto gt = collect(s.plain, &CircleResult::gt_residual);
  const double order = rate_fit(kCircleEps, gt).order;
  const double frac = gt.back() / std::abs(s.plain.back().sigma_kappa_ref);
  const double efrac = s.elastic.mu_ref_error / std::abs(s.elastic.mu_ref);
  Verdict v;
  v.require(order >= kGibbsThomsonOrder, fmt("GT residual order = %.3f", order));
  v.require(frac <= kGibbsThomsonFraction, fmt("at eps=0.02 residual/|sigma kappa| = %.2e", frac));
  v.require(efrac <= kElasticFraction, fmt("elastic |mu - mu_ref|/|mu_ref| = %.2e", efrac));
  v.detail += fmt("; elastic part error/jump = %.3f", s.elastic.elastic_part_error / s.elastic.elastic_jump_ref);
  return report(4, v, s.plain_seconds + s.elastic_seconds, 900.0);
}

bool criterion5() {
  const auto& s = circle_sweep();
  Verdict v;
  for (const auto& r : s.plain) {
    const double bound = kVelocityFactor * std::abs(r.sigma_kappa_ref) * r.epsilon;
    v.require(r.velocity <= bound, fmt("eps=%.2f: ", r.epsilon) + fmt("V = %.2e", r.velocity) + fmt(" <= %.2e", bound));
  }
  // sign calibration: a circle shrinking by dR over dt moves with V = -dR/dt
  const auto t0 = Clock::now();
  const auto& P = profiles();
  const Grid2D g = Grid2D::square(121, 1.2);
  const double eps = 0.04, dR = 0.02, dt = 0.5;
  auto state = [&](double R, double t) {
    PFState st;
    st.c = init_glued(g, sdf(Shape::circle({0.6, 0.6}, R)), eps, 4 * eps, P.theta0, P.theta1, false);
    st.mu = Field(g);
    st.u = VectorField(g);
    st.time = t;
    return st;
  };
  const PFState a = state(0.25, 0.0), b = state(0.25 - dR, dt);
  const auto pa = interface_from_phase(a.c, P.theta0, eps), pb = interface_from_phase(b.c, P.theta0, eps);
  double worst = 0.0;
  for (const auto& q : stefan_residual(a, b, pa, pb, 0.01, 2 * eps))
    worst = std::max(worst, std::abs(q.velocity / (-dR / dt) - 1.0));
  const PFState a2 = state(0.25 - dR, 0.0), b2 = state(0.25, dt);
  bool grows = true;
  for (const auto& q : stefan_residual(a2, b2, pb, pa, 0.01, 2 * eps)) grows = grows && q.velocity > 0.0;
  v.require(worst <= kCalibrationTol && grows, fmt("sign calibration rel. error = %.2e", worst));
  return report(5, v, seconds_since(t0), 900.0);
}

bool criterion6() {
  const auto& s = circle_sweep();
  const double omu = rate_fit(kCircleEps, collect(s.plain, &CircleResult::err_mu)).order;
  const double oc = rate_fit(kCircleEps, collect(s.plain, &CircleResult::err_c)).order;
  Verdict v;
  v.require(omu >= kSharpLimitOrder, fmt("sup_t |mu - mu_sharp|_C0 order = %.3f", omu));
  v.require(oc >= kSharpLimitOrder, fmt("sup_t |c - theta0(d/eps)| order = %.3f", oc));
  return report(6, v, s.plain_seconds, 1800.0);
}

std::vector<BuildRow> build_sweep(bool elastic, double nodes_per_eps = 4.0) {
  std::vector<BuildRow> rows;
  for (double eps : kBuildEps) {
    BuildSetup b;
    b.epsilon = eps;
    b.C_star = kCStar;
    b.nodes_per_eps = nodes_per_eps;
    if (elastic) b.elasticity = kElastic;
    rows.push_back(residual_row(b, profiles(), DoubleWell::quartic()));
  }
  return rows;
}

bool criterion7() {
  const auto t0 = Clock::now();
  const auto plain = build_sweep(false);
  std::vector<double> ratio;
  for (const auto& r : plain) ratio.push_back(r.order1.r_l2 / r.order0.r_l2);
  const double oratio = rate_fit(kBuildEps, ratio).order;
  Verdict v;
  v.require(oratio >= kResidualRatioOrder, fmt("||r_A|| order1/order0 ratio order = %.3f", oratio));
  v.detail += fmt(" (ratios %.3e", ratio[0]) + fmt(" %.3e", ratio[1]) + fmt(" %.3e)", ratio[2]);
  // s_A at fixed eps under h -> h/2; the constant depends on eps through the layer width
  const auto coarse = build_sweep(true, 4.0);
  const auto fine = build_sweep(true, 8.0);
  const double alpha = 2.0 * std::numbers::sqrt2;
  for (std::size_t k = 0; k < kBuildEps.size(); ++k) {
    const double o = std::log(coarse[k].order1.s_l2 / fine[k].order1.s_l2) / std::log(coarse[k].h / fine[k].h);
    const double tail = std::exp(-alpha * (4.0 * kBuildEps[k]) / (4.0 * kBuildEps[k]));
    const double C = coarse[k].order1.s_l2 / (coarse[k].h * coarse[k].h + tail);
    v.require(o >= kStressOrder, fmt("eps=%.2f: ", kBuildEps[k]) + fmt("||s_A|| order in h = %.3f", o) +
                                     fmt(", C = %.3g", C));
  }
  return report(7, v, seconds_since(t0), 300.0);
}

bool criterion8() {
  const auto t0 = Clock::now();
  const auto& P = profiles();
  const DoubleWell W = DoubleWell::quartic();
  const double L = 0.6, gamma1 = 50.0;
  auto layer = [&](double scale) {
    return [&, scale](double eps) {
      SpectralProblem p;
      p.epsilon = eps;
      p.gamma1 = gamma1;
      p.laplacian = LaplacianKind::spectral;
      p.phi = Field::from_function(Grid2D::square(64, L),
                                   [&](Vec2 x) { return scale * P.theta0.at((x.x - 0.5 * L) / eps); });
      return p;
    };
  };
  const auto good = uniformity_report(kSpectralEps, layer(1.0), W, threads(), kUniformityRatio);
  const auto bad = uniformity_report(kSpectralEps, layer(0.3), W, threads(), kUniformityRatio);
  Verdict v;
  bool finite = true;
  for (const auto& r : good.rows) finite = finite && std::isfinite(r.C) && r.C > 0.0;
  v.require(good.passed && finite, fmt("C(eps) = %.4g", good.rows[0].C) + fmt(", %.4g", good.rows[1].C) +
                                       fmt(", %.4g", good.rows[2].C) + fmt(" (max/min %.3f)", good.ratio));
  v.require(!bad.passed, fmt("violating control flagged (max/min %.3g)", bad.ratio));
  return report(8, v, seconds_since(t0), 600.0);
}

bool criterion9() {
  const auto t0 = Clock::now();
  const auto& P = profiles();
  const DoubleWell W = DoubleWell::quartic();
  Verdict v;
  double worst = 0.0;
  bool all = true;
  for (double eps : kBuildEps) {
    BuildSetup b;
    b.epsilon = eps;
    b.C_star = kCStar;
    const auto r = residual_row(b, P, W).structure;
    all = all && r.passed;
    worst = std::max({worst, r.sup_p + r.sup_q_weighted, r.sup_tangential, 1.0 / r.min_fprime_outer});
  }
  for (double eps : kCircleEps) {
    const CircleSetup c{.epsilon = eps};
    BuildOptions o;
    o.epsilon = eps;
    o.delta = 4 * eps;
    const Vec2 ctr{0.5 * c.L, 0.5 * c.L};
    const auto a = build(c.grid(), Shape::circle(ctr, c.R), o, P, constant_outer_fields(P.sigma * -1.0 / c.R));
    const auto r = structure_check(a, P, W, kCStar);
    all = all && r.passed;
    worst = std::max({worst, r.sup_p + r.sup_q_weighted, r.sup_tangential, 1.0 / r.min_fprime_outer});
  }
  v.require(all, fmt("C* = %.0f", kCStar) + fmt(" holds for all 6 builds (largest required constant %.3f)", worst));
  return report(9, v, seconds_since(t0), 300.0);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                    criterion6, criterion7, criterion8, criterion9};
  int failed = 0;
  for (int id = 1; id <= 9; ++id) {
    if (!only.empty() && !only.count(id)) continue;
    try {
      failed += criteria[id - 1]() ? 0 : 1;
    } catch (const std::exception& e) {
      std::printf("criterion %d FAIL exception: %s\n", id, e.what());
      ++failed;
    }
  }
  return failed == 0 ? 0 : 1;
}
