#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "larche/potential.hpp"

using namespace larche;

TEST_CASE("quartic evaluate") {
  const auto F = DoubleWell::quartic();
  CHECK(F.evaluate(1.0, 0) == 0.0);
  CHECK(F.evaluate(-1.0, 0) == 0.0);
  CHECK(F.evaluate(0.0, 1) == 0.0);
  CHECK(F.evaluate(1.0, 2) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(F.evaluate(0.5, 3) == doctest::Approx(12.0));
  CHECK(F.evaluate(0.3, 0) == doctest::Approx((1 - 0.09) * (1 - 0.09)));
  CHECK_THROWS_AS(F.evaluate(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(F.evaluate(0.0, -1), std::invalid_argument);
}

TEST_CASE("derivatives match central differences") {
  const auto F = DoubleWell::quartic();
  const auto G = DoubleWell::polynomial({1.0, 0.1, -2.0, -0.1, 1.0, 0.0, 0.02});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.4, 1.4);
  const double h = 1e-5;
  for (const auto* P : {&F, &G}) {
    for (int s = 0; s < 200; ++s) {
      const double c = U(rng);
      for (int d = 1; d <= 3; ++d) {
        const double fd = (P->evaluate(c + h, d - 1) - P->evaluate(c - h, d - 1)) / (2 * h);
        CHECK(std::abs(fd - P->evaluate(c, d)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("validate quartic") {
  const auto rep = validate(DoubleWell::quartic(), 1000);
  CHECK(rep.checks.size() == 4);
  CHECK(rep.all_passed());
  CHECK(rep.find(kConvexAtInfinity).worst_value >= 0.0);
  const auto rep100 = validate(DoubleWell::quartic(), 100);
  CHECK(rep100.find(kEqualWellIntegrals).passed);
  // int_{-1}^0 f = F(0) - F(-1) = 1
  const auto F = DoubleWell::quartic();
  CHECK(F.F(0.0) - F.F(-1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(validate(F, 99), std::invalid_argument);
}

TEST_CASE("validate flags a raised well") {
  // (1-c^2)^2 + 0.25 (1 + c): F(1) = 0.5
  const auto G = DoubleWell::polynomial({1.25, 0.25, -2.0, 0.0, 1.0});
  CHECK(G.F(1.0) == doctest::Approx(0.5));
  const auto rep = validate(G, 100);
  CHECK_FALSE(rep.find(kMinimumAtWells).passed);
  CHECK_FALSE(rep.all_passed());
  CHECK_THROWS_AS(rep.find("nonexistent"), std::out_of_range);
}

TEST_CASE("validate flags concavity beyond C0") {
  // F = (1-c^2)^2 (1 - c^2/4): c f''(c) < 0 for large |c|
  const auto G = DoubleWell::polynomial({1.0, 0.0, -2.25, 0.0, 1.5, 0.0, -0.25}, 0.0, {-1.6, 1.6});
  const auto rep = validate(G, 400);
  CHECK(rep.find(kMinimumAtWells).passed);
  CHECK(rep.find(kSlopesAtWells).passed);
  CHECK_FALSE(rep.find(kConvexAtInfinity).passed);
}

TEST_CASE("three roots of f") {
  const auto roots = DoubleWell::quartic().roots_of_f();
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(roots[1]) < 1e-12);
  CHECK(roots[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetry and constructor errors") {
  CHECK(DoubleWell::quartic().is_symmetric());
  CHECK_FALSE(DoubleWell::polynomial({1.0, 0.1, -2.0, -0.1, 1.0}).is_symmetric());
  CHECK_THROWS_AS(DoubleWell::polynomial({}), std::invalid_argument);
  CHECK_THROWS_AS(DoubleWell::quartic(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(DoubleWell::polynomial({1.0, 0.0, -2.0, 0.0, 1.0}, 0.0, {-0.5, 1.5}), std::invalid_argument);
}
