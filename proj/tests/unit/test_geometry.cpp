#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "larche/geometry.hpp"

using namespace larche;

namespace {
Field circle_field(int n, Vec2 c, double R) {
  const Grid2D g = Grid2D::square(n, 1.0);
  return Field::from_function(g, [&](Vec2 p) { return (p - c).norm() - R; });
}

double total_turning(const InterfacePolyline& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const std::size_t k1 = (k + 1) % p.size();
    const double ds = (p.points[k1] - p.points[k]).norm();
    s += 0.5 * (p.curvature[k] + p.curvature[k1]) * ds;
  }
  return s;
}
}  // namespace

TEST_CASE("circle contour on 128^2") {
  const Vec2 c{0.5, 0.5};
  const auto poly = extract_zero_contour(circle_field(128, c, 0.25));
  const double h = 1.0 / 127;
  CHECK(std::abs(poly.mean_radius(c) - 0.25) <= h * h);
  CHECK(poly.max_radius_error(c, 0.25) <= 0.05 * h);
  CHECK(poly.signed_area() < 0.0);
  CHECK(std::abs(-poly.signed_area() - std::numbers::pi * 0.0625) < 1e-3);
  for (std::size_t k = 0; k < poly.size(); ++k) {
    CHECK(std::abs(poly.curvature[k] + 4.0) <= 0.08);
    const Vec2 r = poly.points[k] - c;
    CHECK(poly.normals[k].dot(r * (1.0 / r.norm())) > 0.999);
  }
  CHECK(std::abs(total_turning(poly) + 2.0 * std::numbers::pi) <= 0.02 * std::numbers::pi);
  CHECK(std::abs(poly.perimeter - 2.0 * std::numbers::pi * 0.25) < 1e-3);
}

TEST_CASE("orientation follows the sign of the field") {
  const Vec2 c{0.5, 0.5};
  Field f = circle_field(64, c, 0.3);
  for (auto& v : f.values()) v = -v;
  const auto poly = extract_zero_contour(f);
  // positive phase inside now: loop runs counter-clockwise and kappa > 0
  CHECK(poly.signed_area() > 0.0);
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2 r = poly.points[k] - c;
    CHECK(poly.normals[k].dot(r) < 0.0);
    CHECK(poly.curvature[k] > 0.0);
  }
}

TEST_CASE("canonicalize is invariant to input orientation") {
  InterfacePolyline p;
  const int n = 200;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    p.points.push_back({0.5 + 0.3 * std::cos(t), 0.5 + 0.3 * std::sin(t)});
  }
  const auto a = canonicalize(p);
  std::reverse(p.points.begin(), p.points.end());
  const auto b = canonicalize(p);
  CHECK(a.signed_area() < 0.0);
  CHECK(b.signed_area() < 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.curvature[k] == doctest::Approx(-1.0 / 0.3).epsilon(1e-3));
    CHECK(b.curvature[k] == doctest::Approx(-1.0 / 0.3).epsilon(1e-3));
    const Vec2 r = a.points[k] - Vec2{0.5, 0.5};
    CHECK(a.normals[k].dot(r * (1.0 / r.norm())) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("curvature_normals preconditions") {
  InterfacePolyline p;
  for (int k = 0; k < 10; ++k) p.points.push_back({std::cos(k * 0.6), std::sin(k * 0.6)});
  CHECK_THROWS_AS(curvature_normals(p), std::invalid_argument);
  p.points.clear();
  for (int k = 0; k < 20; ++k) p.points.push_back({std::cos(k * 0.3), std::sin(k * 0.3)});
  p.points.insert(p.points.begin() + 5, p.points[5]);
  CHECK_THROWS_AS(curvature_normals(p), std::invalid_argument);
}

TEST_CASE("contour errors") {
  const Grid2D g = Grid2D::square(32, 1.0);
  CHECK_THROWS_AS(extract_zero_contour(Field(g, 1.0)), std::runtime_error);
  CHECK_THROWS_AS(extract_zero_contour(Field(g, -1.0)), std::runtime_error);
  // two circles
  const Field two = Field::from_function(g, [](Vec2 p) {
    return std::min((p - Vec2{0.25, 0.5}).norm(), (p - Vec2{0.75, 0.5}).norm()) - 0.15;
  });
  CHECK_THROWS_AS(extract_zero_contour(two), std::runtime_error);
  // straight interface reaching the boundary
  const Field strip = Field::from_function(g, [](Vec2 p) { return p.x - 0.51; });
  CHECK_THROWS_AS(extract_zero_contour(strip), std::runtime_error);
}

TEST_CASE("one-sided sampling of kinks") {
  const Grid2D g = Grid2D::square(129, 1.0);
  const Vec2 c{0.5, 0.5};
  const double R = 0.25;
  const Field cone = Field::from_function(g, [&](Vec2 p) { return (p - c).norm(); });
  const Field absd = Field::from_function(g, [&](Vec2 p) { return std::abs((p - c).norm() - R); });
  const double h = g.h_max();
  for (int k = 0; k < 16; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 16;
    const Vec2 nu{std::cos(t), std::sin(t)};
    const Vec2 p = c + nu * R;
    const auto a = one_sided_sample(cone, p, nu, 2.0 * h);
    CHECK(std::abs(a.normal_derivative_jump) < 1e-2);
    const auto b = one_sided_sample(absd, p, nu, 2.0 * h);
    CHECK(b.normal_derivative_jump == doctest::Approx(2.0).epsilon(1e-2));
    CHECK(b.plus == doctest::Approx(2.0 * h).epsilon(2e-2));
    CHECK(b.minus == doctest::Approx(2.0 * h).epsilon(2e-2));
  }
  CHECK_THROWS_AS(one_sided_sample(cone, c, {1.0, 0.0}, h), std::invalid_argument);
}

TEST_CASE("circle sdf") {
  const auto m = sdf(Shape::circle({0.5, 0.5}, 0.3));
  const auto s = m.eval({0.9, 0.5});
  CHECK(s.d == doctest::Approx(0.1));
  CHECK(s.curvature == doctest::Approx(1.0 / 0.3));
  CHECK(s.laplacian() == doctest::Approx(1.0 / 0.4));
  CHECK(s.normal.x == doctest::Approx(1.0));
  CHECK(m({0.5, 0.5}) == doctest::Approx(-0.3));
  CHECK_THROWS_AS(Shape::circle({0, 0}, 0.0), std::invalid_argument);
}

TEST_CASE("ellipse sdf") {
  const Vec2 c{0.5, 0.5};
  const auto circ = sdf(Shape::circle(c, 0.3));
  const auto degenerate = sdf(Shape::ellipse(c, 0.3, 0.3));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 p{U(rng), U(rng)};
    CHECK(std::abs(circ(p) - degenerate(p)) < 1e-12);
  }
  const double a = 0.35, b = 0.2;
  const auto e = sdf(Shape::ellipse(c, a, b));
  CHECK(e(c + Vec2{a + 0.05, 0.0}) == doctest::Approx(0.05));
  CHECK(e(c + Vec2{0.0, -b - 0.07}) == doctest::Approx(0.07));
  CHECK(e(c) == doctest::Approx(-b));
  CHECK(e.eval(c + Vec2{a, 0.0}).curvature == doctest::Approx(a / (b * b)));
  CHECK(e.eval(c + Vec2{0.0, b}).curvature == doctest::Approx(b / (a * a)));
  CHECK(Shape::ellipse(c, a, b).min_radius_of_curvature() == doctest::Approx(b * b / a));

  // |grad d| = 1 and grad d = normal, checked by central differences off the medial axis
  const double dh = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const double t = 2.0 * std::numbers::pi * U(rng);
    const double off = -0.1 + 0.25 * U(rng);
    const Vec2 q = c + Vec2{a * std::cos(t), b * std::sin(t)};
    const Vec2 n0 = e.eval(q).normal;
    const Vec2 p = q + n0 * off;
    const double gx = (e(p + Vec2{dh, 0}) - e(p - Vec2{dh, 0})) / (2 * dh);
    const double gy = (e(p + Vec2{0, dh}) - e(p - Vec2{0, dh})) / (2 * dh);
    CHECK(std::hypot(gx, gy) == doctest::Approx(1.0).epsilon(1e-6));
    const auto s = e.eval(p);
    CHECK(s.d == doctest::Approx(off).epsilon(1e-9));
    CHECK(gx == doctest::Approx(s.normal.x).epsilon(1e-5));
    CHECK(gy == doctest::Approx(s.normal.y).epsilon(1e-5));
    // Laplacian of d by a 5-point difference against k / (1 + k d)
    const double h2 = 1e-4;
    const double lap = (e(p + Vec2{h2, 0}) + e(p - Vec2{h2, 0}) + e(p + Vec2{0, h2}) + e(p - Vec2{0, h2}) - 4 * e(p)) /
                       (h2 * h2);
    CHECK(lap == doctest::Approx(s.laplacian()).epsilon(1e-3));
  }
}

TEST_CASE("polyline sdf approximates a circle") {
  std::vector<Vec2> pts;
  const int n = 400;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    pts.push_back({0.5 + 0.3 * std::cos(t), 0.5 + 0.3 * std::sin(t)});
  }
  const auto m = sdf(Shape::from_polyline(pts));
  const auto circ = sdf(Shape::circle({0.5, 0.5}, 0.3));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (int k = 0; k < 100; ++k) {
    const Vec2 p{U(rng), U(rng)};
    CHECK(std::abs(m(p) - circ(p)) < 5e-5);
  }
  const auto s = m.eval({0.85, 0.5});
  CHECK(s.curvature == doctest::Approx(1.0 / 0.3).epsilon(1e-3));
  CHECK(s.normal.x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(Shape::from_polyline({{0, 0}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("ellipse contour curvature and proxy") {
  const Grid2D g = Grid2D::square(257, 1.0);
  const double a = 0.3, b = 0.2;
  const auto e = sdf(Shape::ellipse({0.5, 0.5}, a, b));
  const Field f = Field::from_function(g, [&](Vec2 p) { return e(p); });
  const auto poly = extract_zero_contour(f);
  double worst = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const auto s = e.eval(poly.points[k]);
    worst = std::max(worst, std::abs(poly.curvature[k] + s.curvature) / s.curvature);
  }
  CHECK(worst < 0.03);
  CHECK(std::abs(total_turning(poly) + 2.0 * std::numbers::pi) < 0.02);
  const double proxy = curvature_proxy(poly);
  CHECK(proxy > a / (b * b));
  CHECK(std::isfinite(proxy));
}

TEST_CASE("polyline csv") {
  const auto poly = extract_zero_contour(circle_field(64, {0.5, 0.5}, 0.3));
  const std::string path = "test_geometry_polyline.csv";
  write_polyline_csv(poly, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,nx,ny,kappa,s");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == poly.size());
  std::remove(path.c_str());
}

TEST_CASE("bicubic interpolation") {
  const Grid2D g(21, 17, 1.0, 0.8);
  // exact on bicubic polynomials, including next to the boundary
  auto poly = [](Vec2 p) { return 1 + p.x - 2 * p.y + p.x * p.x * p.x * p.y * p.y - 3 * p.y * p.y * p.y; };
  const Field f = Field::from_function(g, poly);
  for (Vec2 p : {Vec2{0.013, 0.71}, Vec2{0.5, 0.4}, Vec2{0.999, 0.001}, Vec2{1.0, 0.8}, Vec2{0.0, 0.0}})
    CHECK(bicubic(f, p) == doctest::Approx(poly(p)).epsilon(1e-12));
  CHECK_THROWS_AS(bicubic(f, Vec2{1.1, 0.2}), std::out_of_range);
  // fourth-order convergence on a smooth function
  std::vector<double> errs;
  for (int n : {21, 41, 81}) {
    const Grid2D h = Grid2D::square(n, 1.0);
    const Field s = Field::from_function(h, [](Vec2 p) { return std::sin(3 * p.x) * std::cos(2 * p.y); });
    double e = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Vec2 p{0.37 + 0.0013 * k, 0.52 + 0.0021 * k};
      e = std::max(e, std::abs(bicubic(s, p) - std::sin(3 * p.x) * std::cos(2 * p.y)));
    }
    errs.push_back(e);
  }
  CHECK(errs[0] / errs[1] > 12.0);
  CHECK(errs[1] / errs[2] > 12.0);
}

TEST_CASE("level set curvature of a distance field") {
  const Grid2D g = Grid2D::square(121, 1.2);
  const Vec2 ctr{0.6, 0.6};
  const Field d = Field::from_function(g, [&](Vec2 p) { return (p - ctr).norm() - 0.3; });
  const Field k = level_set_curvature(d);
  double err = 0.0;
  for (int j = 2; j < g.ny() - 2; ++j)
    for (int i = 2; i < g.nx() - 2; ++i) {
      const double r = (g.node(i, j) - ctr).norm();
      if (std::abs(r - 0.3) < 0.1) err = std::max(err, std::abs(k(i, j) + 1.0 / r));
    }
  CHECK(err < 1e-4);
  // invariant under monotone reparametrization of the field
  const Field t = Field::from_function(g, [&](Vec2 p) { return std::tanh(((p - ctr).norm() - 0.3) / 0.2); });
  const auto poly = attach_curvature(extract_zero_contour(t), level_set_curvature(t));
  for (double kk : poly.curvature) CHECK(kk == doctest::Approx(-1.0 / 0.3).epsilon(2e-3));
}
