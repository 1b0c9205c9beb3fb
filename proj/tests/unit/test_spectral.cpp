#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "larche/spectral.hpp"

using namespace larche;

namespace {
const Profiles& quartic_profiles() {
  static const Profiles p = make_profiles(DoubleWell::quartic());
  return p;
}

SpectralProblem layer(int n, double eps, double gamma1 = 1.0, double scale = 1.0) {
  const auto& P = quartic_profiles();
  SpectralProblem p;
  p.epsilon = eps;
  p.gamma1 = gamma1;
  p.phi = Field::from_function(Grid2D::square(n, 1.0),
                               [&](Vec2 x) { return scale * P.theta0.at((x.x - 0.5) / eps); });
  return p;
}

Field random_field(const Grid2D& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}
}  // namespace

TEST_CASE("min_rayleigh on a pure phase") {
  // phi = 1: the form is diagonal in the cosine basis, lambda = l (eps l + 8 / eps - gamma1 eps).
  const DoubleWell W = DoubleWell::quartic();
  const int n = 12;
  const double eps = 0.1, h = 1.0 / (n - 1);
  SpectralProblem p;
  p.epsilon = eps;
  p.gamma1 = 0.0;
  p.phi = Field(Grid2D::square(n, 1.0), 1.0);
  const double l1 = std::pow(2.0 / h * std::sin(std::numbers::pi / (2.0 * (n - 1))), 2);
  const auto r = min_rayleigh(p, W);
  CHECK(r.lambda_min == doctest::Approx(l1 * (eps * l1 + 8.0 / eps)).epsilon(1e-10));
  CHECK(r.C() == 0.0);
}

TEST_CASE("min_rayleigh witness") {
  const DoubleWell W = DoubleWell::quartic();
  const auto p = layer(14, 0.1, 50.0);
  const auto r = min_rayleigh(p, W);
  CHECK(r.lambda_min < 0.0);
  CHECK(std::abs(weighted_mean(r.witness)) <= 1e-12);
  CHECK(hminus1_norm_sq(r.witness) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rayleigh_quotient(p, W, r.witness) == doctest::Approx(r.lambda_min).epsilon(1e-9));
  // any other mean-zero vector gives a larger quotient
  for (unsigned s = 0; s < 5; ++s) CHECK(rayleigh_quotient(p, W, random_field(p.grid(), s)) > r.lambda_min);
}

TEST_CASE("min_rayleigh matches projected descent") {
  const DoubleWell W = DoubleWell::quartic();
  for (auto kind : {LaplacianKind::five_point, LaplacianKind::spectral}) {
    auto p = layer(12, 0.1, 10.0);
    p.laplacian = kind;
    const double dense = min_rayleigh(p, W).lambda_min;
    const auto d = descent_min_rayleigh(p, W, 50, 7);
    REQUIRE(d.per_start.size() == 50);
    CHECK(d.lambda_min == doctest::Approx(dense).epsilon(1e-6));
    for (double v : d.per_start) CHECK(v >= dense - 1e-6 * std::abs(dense));
  }
}

TEST_CASE("H^-1 metric equals the gradient norm of the potential") {
  for (auto kind : {LaplacianKind::five_point, LaplacianKind::spectral}) {
    const Grid2D g(17, 13, 1.0, 0.7);
    const Field w = random_field(g, 3);
    const Field psi = inverse_laplacian(w, kind);
    CHECK(std::abs(weighted_mean(psi)) <= 1e-14);
    const double lhs = hminus1_norm_sq(w, kind), rhs = 2.0 * dirichlet_energy(psi, kind);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
  }
}

TEST_CASE("min_rayleigh decreases with gamma1") {
  const DoubleWell W = DoubleWell::quartic();
  double prev = std::numeric_limits<double>::infinity();
  for (double g1 : {0.0, 1.0, 5.0, 20.0}) {
    const double l = min_rayleigh(layer(12, 0.1, g1), W).lambda_min;
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("uniformity_report") {
  const DoubleWell W = DoubleWell::quartic();
  const std::vector<double> eps{0.2, 0.14, 0.1};
  // outer values +-0.3 have f' < 0: C grows as eps shrinks
  const auto bad = uniformity_report(eps, [](double e) { return layer(16, e, 1.0, 0.3); }, W, 2);
  REQUIRE(bad.rows.size() == 3);
  CHECK_FALSE(bad.passed);
  CHECK(bad.rows[2].C > 2.0 * bad.rows[0].C);
  CHECK(bad.rows[0].epsilon == 0.2);

  const auto pos = uniformity_report(
      eps,
      [](double e) {
        SpectralProblem p;
        p.epsilon = e;
        p.phi = Field(Grid2D::square(10, 1.0), -1.0);
        return p;
      },
      W);
  CHECK(pos.passed);
  CHECK(pos.ratio == 1.0);

  CHECK_THROWS_AS(uniformity_report({0.1}, [](double e) { return layer(10, e); }, W), std::invalid_argument);
  const std::string path = "/tmp/larche_test_uniformity.csv";
  write_csv(bad, path);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "epsilon,lambda_min,C");
}

TEST_CASE("spectral preconditions") {
  const DoubleWell W = DoubleWell::quartic();
  SpectralProblem p;
  p.epsilon = 0.1;
  p.phi = Field(Grid2D::square(kSpectralMaxNodes + 1, 1.0), 1.0);
  CHECK_THROWS_AS(min_rayleigh(p, W), std::invalid_argument);
  auto q = layer(10, 0.1);
  q.gamma1 = -1.0;
  CHECK_THROWS_AS(min_rayleigh(q, W), std::invalid_argument);
  q.gamma1 = 1.0;
  q.epsilon = 0.0;
  CHECK_THROWS_AS(min_rayleigh(q, W), std::invalid_argument);
}
