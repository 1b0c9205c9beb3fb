#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "larche/approx.hpp"

using namespace larche;

namespace {
const Profiles& quartic_profiles() {
  static const Profiles p = make_profiles(DoubleWell::quartic());
  return p;
}

const Vec2 kCenter{0.6, 0.6};
constexpr double kR = 0.25;

ApproxSolution radial_build(int n, double eps, int order) {
  const auto& P = quartic_profiles();
  BuildOptions o;
  o.order = order;
  o.epsilon = eps;
  o.delta = 4 * eps;
  const auto ref = radial_reference(kR, 0.8, P.sigma);
  return build(Grid2D::square(n, 1.2), Shape::circle(kCenter, kR), o, P, radial_outer_fields(ref, kCenter));
}
}  // namespace

TEST_CASE("build: order-1 correction") {
  const auto& P = quartic_profiles();
  const double eps = 0.04;
  const auto a0 = radial_build(121, eps, 0);
  const auto a1 = radial_build(121, eps, 1);
  double worst = 0.0;
  for (std::size_t k = 0; k < a0.c.size(); ++k) {
    const double d = a0.distance[k], p = a0.p[k], z = a0.zeta[k];
    const double outer = d >= 0 ? P.theta1.limit_plus : P.theta1.limit_minus;
    const double expect = eps * p * (z * P.theta1.at(d / eps) + (1 - z) * outer);
    worst = std::max(worst, std::abs(a1.c[k] - a0.c[k] - expect));
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("build: far field and interface values") {
  const auto& P = quartic_profiles();
  const auto a = radial_build(121, 0.04, 0);
  for (std::size_t k = 0; k < a.c.size(); ++k) {
    if (std::abs(a.distance[k]) >= 2 * a.delta) CHECK(a.c[k] == (a.distance[k] > 0 ? 1.0 : -1.0));
    CHECK(a.mu[k] == doctest::Approx(-P.sigma / kR).epsilon(1e-14));
  }
  // c_A vanishes on the circle
  const SdfSample on{0.0, kCenter + Vec2{kR, 0}, Vec2{1, 0}, 1.0 / kR};
  CHECK(std::abs(glued_value(on, 0.04, 0.16, P.theta0, P.theta1, true)) <= 1e-12);
}

TEST_CASE("build: bridged displacement") {
  const auto& P = quartic_profiles();
  const auto ref = radial_reference(kR, 0.8, P.sigma, RadialElasticParams{2.0, 1.0, 0.02});
  const auto outer = radial_outer_fields(ref, kCenter);
  BuildOptions o;
  o.delta = 0.16;
  const Grid2D g = Grid2D::square(121, 1.2);
  const auto a = build(g, Shape::circle(kCenter, kR), o, P, outer);
  for (int j = 0; j < g.ny(); j += 7)
    for (int i = 0; i < g.nx(); i += 7) {
      const Vec2 x = g.node(i, j);
      if (std::abs(a.distance(i, j)) < 2 * o.delta) continue;
      const Vec2 u = a.distance(i, j) > 0 ? outer.u_plus(x) : outer.u_minus(x);
      CHECK(a.u.x(i, j) == doctest::Approx(u.x).epsilon(1e-14));
      CHECK(a.u.y(i, j) == doctest::Approx(u.y).epsilon(1e-14));
    }
}

TEST_CASE("residuals: radial order-1 beats order-0 and converges") {
  const DoubleWell W = DoubleWell::quartic();
  std::vector<double> es, r1;
  for (double eps : {0.04, 0.02, 0.01}) {
    const int n = static_cast<int>(std::lround(1.2 / (eps / 4))) + 1;
    const auto n0 = residuals(radial_build(n, eps, 0), W, std::nullopt, LaplacianKind::spectral).norms;
    const auto n1 = residuals(radial_build(n, eps, 1), W, std::nullopt, LaplacianKind::spectral).norms;
    CHECK(n1.r_l2 < 0.1 * n0.r_l2);
    CHECK(n1.r_max < 0.2 * n0.r_max);
    CHECK(n1.mass_max <= 1e-8);
    es.push_back(eps);
    r1.push_back(n1.r_l2);
  }
  CHECK(rate_fit(es, r1).order >= 0.9);
}

TEST_CASE("residuals: radial equilibrium displacement") {
  const auto& P = quartic_profiles();
  const ElasticSetup el{ElasticityTensor::isotropic(2.0, 1.0), Eigenstrain::dilatational(0.02)};
  BuildOptions o;
  o.displacement = DisplacementModel::radial_equilibrium;
  o.elasticity = el;
  double prev = 0.0;
  for (int n : {121, 241}) {
    const auto a = build(Grid2D::square(n, 1.2), Shape::circle(kCenter, kR), o, P,
                         constant_outer_fields(-P.sigma / kR));
    const auto r = residuals(a, DoubleWell::quartic(), el, LaplacianKind::spectral);
    if (prev > 0.0) CHECK(prev / r.norms.s_l2 >= 3.5);
    prev = r.norms.s_l2;
  }
  o.elasticity.reset();
  CHECK_THROWS_AS(build(Grid2D::square(61, 1.2), Shape::circle(kCenter, kR), o, P, constant_outer_fields(0.0)),
                  std::invalid_argument);
  o.elasticity = ElasticSetup{ElasticityTensor::isotropic(2.0, 1.0), Eigenstrain::dilatational(0.02)};
  CHECK_THROWS_AS(build(Grid2D::square(61, 1.2), Shape::ellipse(kCenter, 0.3, 0.2), o, P,
                        constant_outer_fields(0.0)),
                  std::invalid_argument);
}

TEST_CASE("build preconditions") {
  const auto& P = quartic_profiles();
  BuildOptions o;
  o.order = 2;
  CHECK_THROWS_AS(build(Grid2D::square(61, 1.2), Shape::circle(kCenter, kR), o, P, constant_outer_fields(0.0)),
                  std::invalid_argument);
  o.order = 1;
  CHECK_THROWS_AS(build(Grid2D::square(61, 1.2), Shape::circle(kCenter, kR), o, P, OuterFields{}),
                  std::invalid_argument);
}

TEST_CASE("structure_check") {
  const auto& P = quartic_profiles();
  const DoubleWell W = DoubleWell::quartic();
  const auto a = radial_build(121, 0.04, 1);
  const auto rep = structure_check(a, P, W, 10.0);
  CHECK(rep.passed);
  CHECK(rep.sup_p == doctest::Approx(4.0));
  CHECK(rep.sup_q_weighted <= 1e-10);
  CHECK(rep.sup_tangential <= 1e-6);
  CHECK(rep.min_signed_outer > 0.9);
  CHECK(rep.geometry_proxy == doctest::Approx(4.0));
  CHECK_FALSE(structure_check(a, P, W, 3.0).passed);
  CHECK_THROWS_AS(structure_check(a, P, W, 0.0), std::invalid_argument);
}

TEST_CASE("rate_fit") {
  const std::vector<double> e{0.08, 0.04, 0.02, 0.01};
  std::vector<double> lin, quad, flat;
  for (double x : e) {
    lin.push_back(3 * x);
    quad.push_back(0.5 * x * x);
    flat.push_back(2.0);
  }
  CHECK(rate_fit(e, lin).order == doctest::Approx(1.0));
  CHECK(rate_fit(e, lin).constant == doctest::Approx(3.0));
  CHECK(rate_fit(e, quad).order == doctest::Approx(2.0));
  CHECK(rate_fit(e, quad).constant == doctest::Approx(0.5));
  CHECK(rate_fit(e, flat).order == doctest::Approx(0.0));
  CHECK_THROWS_AS(rate_fit({0.1, 0.05}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(rate_fit({0.1, 0.05, 0.02}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(rate_fit({0.1, 0.2, 0.02}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(rate_fit({0.1, 0.05, 0.02}, {1, 0, 3}), std::invalid_argument);
}
