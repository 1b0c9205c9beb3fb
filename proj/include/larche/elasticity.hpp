#pragma once

#include <array>
#include <functional>
#include <vector>

#include "larche/grid.hpp"

namespace larche {

struct Mat2 {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

  static Mat2 identity(double s = 1.0) { return {s, 0.0, 0.0, s}; }
  static Mat2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

  Mat2 operator+(const Mat2& o) const { return {xx + o.xx, xy + o.xy, yx + o.yx, yy + o.yy}; }
  Mat2 operator-(const Mat2& o) const { return {xx - o.xx, xy - o.xy, yx - o.yx, yy - o.yy}; }
  Mat2 operator*(double s) const { return {xx * s, xy * s, yx * s, yy * s}; }
  Mat2 operator*(const Mat2& o) const {
    return {xx * o.xx + xy * o.yx, xx * o.xy + xy * o.yy, yx * o.xx + yy * o.yx, yx * o.xy + yy * o.yy};
  }
  Vec2 operator*(Vec2 v) const { return {xx * v.x + xy * v.y, yx * v.x + yy * v.y}; }
  Mat2 transpose() const { return {xx, yx, xy, yy}; }
  Mat2 sym() const {
    const double o = 0.5 * (xy + yx);
    return {xx, o, o, yy};
  }
  double trace() const { return xx + yy; }
  /// A : B
  double ddot(const Mat2& o) const { return xx * o.xx + xy * o.xy + yx * o.yx + yy * o.yy; }
  double norm() const { return std::sqrt(ddot(*this)); }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

/// Voigt strain vector (e11, e22, 2 e12) of sym(A).
std::array<double, 3> to_voigt_strain(const Mat2& A);

/// Rank-4 tensor with minor and major symmetries, stored as a symmetric 3x3
/// Voigt matrix acting on (e11, e22, 2 e12) and returning (S11, S22, S12).
class ElasticityTensor {
 public:
  static ElasticityTensor isotropic(double lambda, double mu);
  /// Row-major symmetric 3x3; throws if not symmetric or not positive definite.
  static ElasticityTensor from_voigt(const std::array<double, 9>& v);

  const std::array<double, 9>& voigt() const { return v_; }
  double voigt(int r, int c) const { return v_[3 * r + c]; }
  /// Largest c2 with A : C A >= 2 c2 |sym A|^2.
  double c2() const { return c2_; }
  bool is_isotropic() const { return iso_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Smallest (a x b) : C (a x b) over `samples` unit pairs.
  double rank_one_min(int samples) const;

 private:
  ElasticityTensor() = default;
  void finish();

  std::array<double, 9> v_{};
  double c2_ = 0.0;
  bool iso_ = false;
  double lambda_ = 0.0;
  double mu_ = 0.0;
};

/// Stress-free strain per unit concentration.
class Eigenstrain {
 public:
  Eigenstrain() = default;
  /// Throws unless symmetric within 1e-14.
  explicit Eigenstrain(const Mat2& m);
  static Eigenstrain dilatational(double e) { return Eigenstrain(Mat2::identity(e)); }
  const Mat2& matrix() const { return m_; }

 private:
  Mat2 m_{};
};

/// C sym(A).
Mat2 apply(const ElasticityTensor& C, const Mat2& A);

struct ElasticPoint {
  double W = 0.0;
  Mat2 S;
  double dWdc = 0.0;
};

/// W = 1/2 (E - E* c) : C (E - E* c), S = C (E - E* c), dW/dc = -E* : S.
ElasticPoint energy_and_stress(const ElasticityTensor& C, const Eigenstrain& E, double c, const Mat2& Eu);

/// 1/2 nu^T ([W I - grad(u)^T S]_+ - [.]_-) nu with W, S from sym(grad u) on each side.
double elastic_jump(const ElasticityTensor& C, const Eigenstrain& E, const Mat2& gradU_plus,
                    const Mat2& gradU_minus, double c_plus, double c_minus, Vec2 nu);

/// Radial inclusion: u = u_r(r) e_r with u_r = A r (r < R), B r + D / r (r > R),
/// continuous u_r and radial traction at R, u_r(Rout) = 0. Isotropic C,
/// eigenstrain estar * I.
struct RadialElasticFields {
  double R = 0.0, Rout = 0.0;
  double lambda = 0.0, mu = 0.0, estar = 0.0;
  double c_in = 0.0, c_out = 0.0;
  double A = 0.0, B = 0.0, D = 0.0;
  double jump = 0.0;  ///< 1/2 nu^T [W I - grad u^T S] nu at r = R

  double u_r(double r) const;
  /// Displacement and gradient at offset x from the center.
  Vec2 u(Vec2 x) const;
  Mat2 grad(Vec2 x) const;
  double concentration(double r) const { return r < R ? c_in : c_out; }
};

RadialElasticFields radial_solution(double R, double Rout, double lambda, double mu, double estar,
                                    double c_in, double c_out);

/// Radially symmetric equilibrium for a smooth radial concentration c(r):
/// u_r = (beta / r) int_0^r s c(s) ds + K r / 2 with beta = 2 (lambda + mu) estar / (lambda + 2 mu)
/// and u_r(Rout) = 0. Tabulated on a fine radial grid.
class RadialEquilibrium {
 public:
  RadialEquilibrium(std::function<double(double)> c_of_r, double Rout, double lambda, double mu,
                    double estar, int samples = 20000);
  double u_r(double r) const;
  double du_r(double r) const;
  Vec2 u(Vec2 x) const;
  Mat2 grad(Vec2 x) const;
  double K() const { return K_; }

 private:
  double moment(double r) const;  // int_0^r s c(s) ds
  std::function<double(double)> c_;
  double Rout_, beta_, K_ = 0.0, dr_;
  std::vector<double> cum_;
};

}  // namespace larche
