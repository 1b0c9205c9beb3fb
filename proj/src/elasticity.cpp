#include "larche/elasticity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace larche {

std::array<double, 3> to_voigt_strain(const Mat2& A) { return {A.xx, A.yy, A.xy + A.yx}; }

ElasticityTensor ElasticityTensor::isotropic(double lambda, double mu) {
  if (!(mu > 0.0) || !(lambda + mu > 0.0))
    throw std::invalid_argument("ElasticityTensor: need mu > 0 and lambda + mu > 0");
  ElasticityTensor C;
  C.v_ = {lambda + 2 * mu, lambda, 0.0, lambda, lambda + 2 * mu, 0.0, 0.0, 0.0, mu};
  C.iso_ = true;
  C.lambda_ = lambda;
  C.mu_ = mu;
  C.finish();
  return C;
}

ElasticityTensor ElasticityTensor::from_voigt(const std::array<double, 9>& v) {
  for (int r = 0; r < 3; ++r)
    for (int c = r + 1; c < 3; ++c)
      if (std::abs(v[3 * r + c] - v[3 * c + r]) > 1e-12 * (1.0 + std::abs(v[3 * r + c])))
        throw std::invalid_argument("ElasticityTensor: Voigt matrix not symmetric");
  ElasticityTensor C;
  C.v_ = v;
  C.finish();
  return C;
}

void ElasticityTensor::finish() {
  // Mandel form P V P with P = diag(1, 1, sqrt 2) is the matrix of A -> C A in
  // an orthonormal basis of symmetric 2x2 matrices.
  Eigen::Matrix3d M;
  const double p[3] = {1.0, 1.0, std::sqrt(2.0)};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) M(r, c) = p[r] * v_[3 * r + c] * p[c];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (!(lmin > 0.0)) throw std::invalid_argument("ElasticityTensor: not positive definite");
  c2_ = 0.5 * lmin;
}

double ElasticityTensor::rank_one_min(int samples) const {
  const int m = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(samples))));
  double worst = INFINITY;
  for (int i = 0; i < m; ++i) {
    const double a = std::numbers::pi * i / m;
    for (int j = 0; j < 2 * m; ++j) {
      const double b = std::numbers::pi * j / m;
      const Mat2 A = Mat2::outer({std::cos(a), std::sin(a)}, {std::cos(b), std::sin(b)});
      const Mat2 CA = larche::apply(*this, A);
      worst = std::min(worst, A.ddot(CA));
    }
  }
  return worst;
}

Eigenstrain::Eigenstrain(const Mat2& m) : m_(m) {
  if (std::abs(m.xy - m.yx) > 1e-14) throw std::invalid_argument("Eigenstrain: matrix not symmetric");
}

Mat2 apply(const ElasticityTensor& C, const Mat2& A) {
  const auto e = to_voigt_strain(A);
  double s[3];
  for (int r = 0; r < 3; ++r) s[r] = C.voigt(r, 0) * e[0] + C.voigt(r, 1) * e[1] + C.voigt(r, 2) * e[2];
  return {s[0], s[2], s[2], s[1]};
}

ElasticPoint energy_and_stress(const ElasticityTensor& C, const Eigenstrain& E, double c, const Mat2& Eu) {
  const Mat2 el = Eu.sym() - E.matrix() * c;
  ElasticPoint p;
  p.S = apply(C, el);
  p.W = 0.5 * el.ddot(p.S);
  p.dWdc = -E.matrix().ddot(p.S);
  return p;
}

double elastic_jump(const ElasticityTensor& C, const Eigenstrain& E, const Mat2& gradU_plus,
                    const Mat2& gradU_minus, double c_plus, double c_minus, Vec2 nu) {
  if (std::abs(nu.norm() - 1.0) > 1e-12) throw std::invalid_argument("elastic_jump: nu must be a unit vector");
  auto side = [&](const Mat2& gu, double c) {
    const auto p = energy_and_stress(C, E, c, gu);
    const Mat2 M = Mat2::identity(p.W) - gu.transpose() * p.S;
    return nu.dot(M * nu);
  };
  return 0.5 * (side(gradU_plus, c_plus) - side(gradU_minus, c_minus));
}

double RadialElasticFields::u_r(double r) const { return r < R ? A * r : B * r + D / r; }

Vec2 RadialElasticFields::u(Vec2 x) const {
  const double r = x.norm();
  if (r == 0.0) return {};
  return x * (u_r(r) / r);
}

Mat2 RadialElasticFields::grad(Vec2 x) const {
  const double r = x.norm();
  if (r < R) return Mat2::identity(A);
  const double r2 = r * r;
  return Mat2::identity(B + D / r2) - Mat2::outer(x, x) * (2.0 * D / (r2 * r2));
}

RadialElasticFields radial_solution(double R, double Rout, double lambda, double mu, double estar,
                                    double c_in, double c_out) {
  if (!(R > 0.0 && R < Rout)) throw std::invalid_argument("radial_solution: need 0 < R < Rout");
  if (!(mu > 0.0) || !(lambda + mu > 0.0))
    throw std::invalid_argument("radial_solution: need mu > 0 and lambda + mu > 0");
  RadialElasticFields f{R, Rout, lambda, mu, estar, c_in, c_out};
  const double k = 2.0 * lambda + 2.0 * mu;
  Eigen::Matrix3d M;
  M << R, -R, -1.0 / R,  //
      k, -k, 2.0 * mu / (R * R),  //
      0.0, Rout, 1.0 / Rout;
  const Eigen::Vector3d rhs(0.0, k * estar * (c_in - c_out), 0.0);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
  if (!lu.isInvertible()) throw std::runtime_error("radial_solution: degenerate linear system");
  const Eigen::Vector3d x = lu.solve(rhs);
  f.A = x(0);
  f.B = x(1);
  f.D = x(2);
  const auto C = ElasticityTensor::isotropic(lambda, mu);
  const auto E = Eigenstrain::dilatational(estar);
  const Vec2 p{R, 0.0};
  f.jump = elastic_jump(C, E, f.grad(p * (1.0 + 1e-15)), Mat2::identity(f.A), c_out, c_in, {1.0, 0.0});
  return f;
}

RadialEquilibrium::RadialEquilibrium(std::function<double(double)> c_of_r, double Rout, double lambda,
                                     double mu, double estar, int samples)
    : c_(std::move(c_of_r)), Rout_(Rout) {
  if (!(Rout > 0.0) || samples < 10) throw std::invalid_argument("RadialEquilibrium: bad parameters");
  beta_ = 2.0 * (lambda + mu) * estar / (lambda + 2.0 * mu);
  dr_ = Rout / samples;
  cum_.assign(samples + 1, 0.0);
  for (int k = 0; k < samples; ++k) {
    const double a = k * dr_, b = a + dr_, m = a + 0.5 * dr_;
    cum_[k + 1] = cum_[k] + dr_ / 6.0 * (a * c_(a) + 4.0 * m * c_(m) + b * c_(b));
  }
  K_ = -2.0 * beta_ * cum_.back() / (Rout * Rout);
}

double RadialEquilibrium::moment(double r) const {
  if (r <= 0.0) return 0.0;
  int k = static_cast<int>(r / dr_);
  if (k >= static_cast<int>(cum_.size()) - 1) k = static_cast<int>(cum_.size()) - 1;
  const double a = k * dr_;
  const double len = r - a;
  if (len <= 0.0) return cum_[k];
  const double m = a + 0.5 * len;
  return cum_[k] + len / 6.0 * (a * c_(a) + 4.0 * m * c_(m) + r * c_(r));
}

double RadialEquilibrium::u_r(double r) const {
  if (r < 1e-12) return 0.0;
  return beta_ * moment(r) / r + 0.5 * K_ * r;
}

double RadialEquilibrium::du_r(double r) const {
  if (r < 1e-12) return 0.5 * beta_ * c_(0.0) + 0.5 * K_;
  return -beta_ * moment(r) / (r * r) + beta_ * c_(r) + 0.5 * K_;
}

Vec2 RadialEquilibrium::u(Vec2 x) const {
  const double r = x.norm();
  if (r < 1e-12) return {};
  return x * (u_r(r) / r);
}

Mat2 RadialEquilibrium::grad(Vec2 x) const {
  const double r = x.norm();
  if (r < 1e-12) return Mat2::identity(du_r(0.0));
  const double ur = u_r(r);
  return Mat2::identity(ur / r) + Mat2::outer(x, x) * ((du_r(r) - ur / r) / (r * r));
}

}  // namespace larche
