#include <cmath>
#include <numbers>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "larche/sharpref.hpp"

using namespace larche;

namespace {
const Profiles& quartic_profiles() {
  static const Profiles p = make_profiles(DoubleWell::quartic());
  return p;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(h.size());
  for (int k = 0; k < n; ++k) {
    const double x = std::log(h[k]), y = std::log(e[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PFState glued_state(const Grid2D& g, Vec2 ctr, double R, double eps, double mu) {
  const auto& P = quartic_profiles();
  PFState s;
  s.c = init_glued(g, sdf(Shape::circle(ctr, R)), eps, 4 * eps, P.theta0, P.theta1, false);
  s.mu = Field(g, mu);
  s.u = VectorField(g);
  return s;
}
}  // namespace

TEST_CASE("radial_reference without elasticity") {
  const double sigma = 2.0 * std::numbers::sqrt2 / 3.0;
  const auto ref = radial_reference(0.25, 0.6, sigma);
  CHECK(ref.kappa == -4.0);
  CHECK(ref.mu_value == doctest::Approx(-3.771236166).epsilon(1e-9));
  CHECK(ref.velocity == 0.0);
  CHECK(ref.elastic_jump == 0.0);
  CHECK_FALSE(ref.disk_geometry);
  CHECK_THROWS_AS(radial_reference(0.0, 1.0, sigma), std::invalid_argument);
  CHECK_THROWS_AS(radial_reference(1.0, 1.0, sigma), std::invalid_argument);
  CHECK_THROWS_AS(radial_reference(-0.2, 1.0, sigma), std::invalid_argument);
}

TEST_CASE("radial_reference with elasticity") {
  const double sigma = 0.9428090415820634;
  const auto zero = radial_reference(0.3, 0.8, sigma, RadialElasticParams{2.0, 1.0, 0.0});
  CHECK(zero.elastic_jump == 0.0);
  CHECK(zero.mu_value == doctest::Approx(-sigma / 0.3));

  const auto ref = radial_reference(0.3, 0.8, sigma, RadialElasticParams{2.0, 1.0, 0.02});
  REQUIRE(ref.elastic);
  CHECK(ref.disk_geometry);
  const auto direct = radial_solution(0.3, 0.8, 2.0, 1.0, 0.02, -1.0, 1.0);
  CHECK(ref.elastic_jump == direct.jump);
  CHECK(ref.elastic_jump != 0.0);
  CHECK(ref.mu_value == doctest::Approx(sigma * ref.kappa + direct.jump).epsilon(1e-14));
  CHECK(ref.velocity == 0.0);
}

TEST_CASE("gibbs_thomson_residual on a constructed state") {
  const auto& P = quartic_profiles();
  const double R = 0.25, eps = 0.04, L = 1.2;
  const double mu = P.sigma * (-1.0 / R);
  std::vector<double> hs, errs;
  for (int n : {61, 121, 241}) {
    const Grid2D g = Grid2D::square(n, L);
    const PFState s = glued_state(g, {0.6, 0.6}, R, eps, mu);
    const auto poly = interface_from_phase(s.c, P.theta0, eps);
    const auto res = gibbs_thomson_residual(s, poly, P.sigma, eps, 2 * eps);
    CHECK(res.size() == poly.size());
    const double e = max_abs_residual(res);
    CHECK(e <= 2e-2);
    hs.push_back(g.hx());
    errs.push_back(e);
  }
  CHECK(fit_order(hs, errs) >= 1.5);
}

TEST_CASE("gibbs_thomson_residual first-order inversion") {
  // The order-1 glued profile is inverted exactly by the first-order pass.
  const auto& P = quartic_profiles();
  const double R = 0.25, eps = 0.04;
  const Grid2D g = Grid2D::square(121, 1.2);
  PFState s;
  s.c = init_glued(g, sdf(Shape::circle({0.6, 0.6}, R)), eps, 4 * eps, P.theta0, P.theta1, true);
  s.mu = Field(g, -P.sigma / R);
  s.u = VectorField(g);
  const auto plain = interface_from_phase(s.c, P.theta0, eps);
  const auto first = interface_from_phase(s.c, P.theta0, eps, &P.theta1);
  const double e0 = max_abs_residual(gibbs_thomson_residual(s, plain, P.sigma, eps, 2 * eps));
  const double e1 = max_abs_residual(gibbs_thomson_residual(s, first, P.sigma, eps, 2 * eps));
  CHECK(e1 < 0.2 * e0);
  CHECK(e1 < 2e-3);
}

TEST_CASE("gibbs_thomson_residual elastic term") {
  const auto& P = quartic_profiles();
  const Grid2D g = Grid2D::square(121, 1.2);
  PFState s = glued_state(g, {0.6, 0.6}, 0.25, 0.04, 0.0);
  const auto poly = interface_from_phase(s.c, P.theta0, 0.04);
  ElasticSetup none{ElasticityTensor::isotropic(2.0, 1.0), Eigenstrain::dilatational(0.0)};
  for (const auto& r : gibbs_thomson_residual(s, poly, P.sigma, 0.04, 0.08, &none)) {
    CHECK(r.elastic_term == 0.0);
    CHECK(r.residual == doctest::Approx(-P.sigma * r.kappa));
  }
  // Radial closed-form displacement: the term matches the sharp jump.
  const auto rad = radial_solution(0.25, 0.8, 2.0, 1.0, 0.02, -1.0, 1.0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 u = rad.u(g.node(i, j) - Vec2{0.6, 0.6});
      s.u.x(i, j) = u.x;
      s.u.y(i, j) = u.y;
    }
  ElasticSetup on{ElasticityTensor::isotropic(2.0, 1.0), Eigenstrain::dilatational(0.02)};
  for (const auto& r : gibbs_thomson_residual(s, poly, P.sigma, 0.04, 0.12, &on))
    CHECK(r.elastic_term == doctest::Approx(rad.jump).epsilon(0.05));
}

TEST_CASE("gibbs_thomson_residual preconditions") {
  const auto& P = quartic_profiles();
  const Grid2D g = Grid2D::square(121, 1.2);
  const PFState s = glued_state(g, {0.6, 0.6}, 0.25, 0.04, 0.0);
  const auto poly = interface_from_phase(s.c, P.theta0, 0.04);
  CHECK_THROWS_AS(gibbs_thomson_residual(s, poly, P.sigma, 0.04, 0.07), std::invalid_argument);
  ElasticSetup on{ElasticityTensor::isotropic(2.0, 1.0), Eigenstrain::dilatational(0.02)};
  CHECK_THROWS_AS(gibbs_thomson_residual(s, poly, P.sigma, 0.04, 0.5, &on), std::runtime_error);
}

TEST_CASE("stefan_residual identical frames") {
  const auto& P = quartic_profiles();
  const Grid2D g = Grid2D::square(121, 1.2);
  PFState a = glued_state(g, {0.6, 0.6}, 0.25, 0.04, 0.0);
  // mu = |x - x0| - R: outward slope +1 outside, -1 inside, jump +2.
  a.mu = Field::from_function(g, [](Vec2 p) { return std::abs((p - Vec2{0.6, 0.6}).norm() - 0.25); });
  PFState b = a;
  b.time = a.time + 1.0;
  const auto poly = interface_from_phase(a.c, P.theta0, 0.04);
  const auto res = stefan_residual(a, b, poly, poly, 0.01, 0.05);
  REQUIRE(res.size() == poly.size());
  for (const auto& r : res) {
    CHECK(r.velocity == 0.0);
    CHECK(r.jump == doctest::Approx(2.0).epsilon(2e-2));
    CHECK(r.residual == 0.5 * r.jump);
  }
}

TEST_CASE("stefan_residual sign calibration") {
  // A circle shrinking from R to R - dR in time dt moves against the outward
  // normal: V = -dR / dt.
  const auto& P = quartic_profiles();
  const Grid2D g = Grid2D::square(121, 1.2);
  const double dR = 0.02, dt = 0.5;
  PFState a = glued_state(g, {0.6, 0.6}, 0.25, 0.04, 0.0);
  PFState b = glued_state(g, {0.6, 0.6}, 0.25 - dR, 0.04, 0.0);
  b.time = dt;
  const auto pa = interface_from_phase(a.c, P.theta0, 0.04);
  const auto pb = interface_from_phase(b.c, P.theta0, 0.04);
  for (const auto& r : stefan_residual(a, b, pa, pb, 0.01, 0.05)) {
    CHECK(r.velocity == doctest::Approx(-dR / dt).epsilon(0.02));
    CHECK(r.jump == 0.0);
  }
  PFState a_late = a;
  b.time = 0.0;
  a_late.time = dt;
  const auto grow = stefan_residual(b, a_late, pb, pa, 0.01, 0.05);
  CHECK(grow.front().velocity > 0.0);
}

TEST_CASE("stefan_residual preconditions") {
  const auto& P = quartic_profiles();
  const Grid2D g = Grid2D::square(121, 1.2);
  PFState a = glued_state(g, {0.6, 0.6}, 0.25, 0.04, 0.0);
  PFState b = glued_state(g, {0.6, 0.6}, 0.2, 0.04, 0.0);
  b.time = 0.05;
  const auto pa = interface_from_phase(a.c, P.theta0, 0.04);
  const auto pb = interface_from_phase(b.c, P.theta0, 0.04);
  CHECK_THROWS_AS(stefan_residual(a, b, pa, pb, 0.01, 0.05), std::invalid_argument);
  CHECK_THROWS_WITH_AS(stefan_residual(a, b, pa, pb, 0.001, 0.05), doctest::Contains("counterpart"),
                       std::runtime_error);
}

TEST_CASE("residual csv headers") {
  std::vector<GibbsThomsonPoint> gt(2);
  std::vector<StefanPoint> st(1);
  const std::string p1 = "/tmp/larche_test_gt.csv", p2 = "/tmp/larche_test_st.csv";
  write_csv(gt, p1);
  write_csv(st, p2);
  std::ifstream f1(p1), f2(p2);
  std::string h1, h2;
  std::getline(f1, h1);
  std::getline(f2, h2);
  CHECK(h1 == "s,x,y,mu_meas,kappa,elastic_term,residual");
  CHECK(h2 == "s,x,y,velocity,jump,residual");
}
