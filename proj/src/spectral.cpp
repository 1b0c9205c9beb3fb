#include "larche/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "larche/dct.hpp"

namespace larche {
namespace {

void check_problem(const SpectralProblem& p) {
  const Grid2D& g = p.grid();
  if (g.nx() > kSpectralMaxNodes || g.ny() > kSpectralMaxNodes)
    throw std::invalid_argument("spectral: grid larger than " + std::to_string(kSpectralMaxNodes) + " nodes per side");
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("spectral: epsilon must be positive");
  if (!(p.gamma1 >= 0.0)) throw std::invalid_argument("spectral: gamma1 must be >= 0");
  if (!all_finite(p.phi)) throw std::invalid_argument("spectral: phi has non-finite values");
}

// Cosine modes on n nodes, orthonormal for trapezoid weights of spacing h.
Eigen::MatrixXd cosine_basis(int n, double h) {
  Eigen::MatrixXd B(n, n);  // B(i, k)
  for (int k = 0; k < n; ++k) {
    const double norm2 = (k == 0 || k == n - 1) ? h * (n - 1) : 0.5 * h * (n - 1);
    const double s = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < n; ++i) B(i, k) = s * std::cos(std::numbers::pi * k * i / (n - 1));
  }
  return B;
}

Eigen::VectorXd trapezoid(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w(0) *= 0.5;
  w(n - 1) *= 0.5;
  return w;
}

void remove_mean(Field& w) {
  const double m = weighted_mean(w);
  for (double& v : w.values()) v -= m;
}

double dot_w(const Field& a, const Field& b) {
  const Grid2D& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) s += g.node_weight(i, j) * a(i, j) * b(i, j);
  return s;
}

Field inverse_laplacian_with(const NeumannSpectral& sp, const std::vector<double>& lam, const Field& w) {
  std::vector<double> hat(w.size());
  sp.forward(w.data(), hat.data());
  hat[0] = 0.0;
  for (std::size_t k = 1; k < hat.size(); ++k) hat[k] /= lam[k];
  Field psi(w.grid());
  sp.inverse(hat.data(), psi.data());
  return psi;
}

// Q(w) without the mean projection; w is assumed mean zero.
Field apply_form(const SpectralProblem& p, const Field& F, const Field& w) {
  Field out(w.grid());
  apply_laplacian(w, out, p.laplacian);
  for (std::size_t k = 0; k < w.size(); ++k)
    out[k] = -p.epsilon * out[k] + (F[k] - p.gamma1 * p.epsilon) * w[k];
  return out;
}

Field scaled_fprime(const SpectralProblem& p, const DoubleWell& potential) {
  Field F(p.grid());
  for (std::size_t k = 0; k < F.size(); ++k) F[k] = potential.fp(p.phi[k]) / p.epsilon;
  return F;
}

}  // namespace

RayleighResult min_rayleigh(const SpectralProblem& p, const DoubleWell& potential) {
  check_problem(p);
  const Grid2D& g = p.grid();
  const int nx = g.nx(), ny = g.ny();
  const int N = nx * ny - 1;
  const NeumannSpectral sp(g);
  const std::vector<double> lam = laplacian_eigenvalues(sp, p.laplacian);
  const Field F = scaled_fprime(p, potential);
  const Eigen::MatrixXd Bx = cosine_basis(nx, g.hx()), By = cosine_basis(ny, g.hy());
  const Eigen::VectorXd wx = trapezoid(nx, g.hx()), wy = trapezoid(ny, g.hy());

  // T[(a, c)][j] = sum_i wx_i F_ij Bx(i, a) Bx(i, c)
  Eigen::MatrixXd T(nx * nx, ny);
  for (int j = 0; j < ny; ++j) {
    Eigen::VectorXd col(nx);
    for (int i = 0; i < nx; ++i) col(i) = wx(i) * F(i, j);
    const Eigen::MatrixXd Mj = Bx.transpose() * col.asDiagonal() * Bx;
    for (int c = 0; c < nx; ++c)
      for (int a = 0; a < nx; ++a) T(c * nx + a, j) = Mj(a, c);
  }
  // G[(a, b), (c, d)] = sum_j wy_j By(j, b) By(j, d) T[(a, c)][j]
  Eigen::MatrixXd M(N, N);
  const Eigen::MatrixXd Wy = wy.asDiagonal() * By;  // (j, b)
  for (int d = 0; d < ny; ++d) {
    // S(ac, b) = sum_j T(ac, j) wy_j By(j, b) By(j, d)
    Eigen::MatrixXd Wd = Wy;
    for (int j = 0; j < ny; ++j) Wd.row(j) *= By(j, d);
    const Eigen::MatrixXd S = T * Wd;
    for (int c = 0; c < nx; ++c) {
      const int col = d * nx + c - 1;
      if (col < 0) continue;
      for (int b = 0; b < ny; ++b)
        for (int a = 0; a < nx; ++a) {
          const int row = b * nx + a - 1;
          if (row < 0) continue;
          M(row, col) = S(c * nx + a, b);
        }
    }
  }
  Eigen::VectorXd s(N);
  for (int k = 0; k < N; ++k) s(k) = std::sqrt(lam[k + 1]);
  for (int k = 0; k < N; ++k) M(k, k) += p.epsilon * (lam[k + 1] - p.gamma1);
  M = s.asDiagonal() * M * s.asDiagonal();
  M = 0.5 * (M + M.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("min_rayleigh: eigensolver failed");
  RayleighResult r;
  r.lambda_min = es.eigenvalues()(0);

  // inverse iteration for the witness
  const double shift = r.lambda_min - 1e-8 * (1.0 + std::abs(r.lambda_min));
  Eigen::MatrixXd K = M;
  K.diagonal().array() -= shift;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("min_rayleigh: inverse iteration failed");
  Eigen::VectorXd v = Eigen::VectorXd::Ones(N).normalized();
  for (int it = 0; it < 4; ++it) v = ldlt.solve(v).normalized();

  // w = sum_k s_k v_k Phi_k
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nx, ny);
  for (int k = 0; k < N; ++k) C((k + 1) % nx, (k + 1) / nx) = s(k) * v(k);
  const Eigen::MatrixXd W = Bx * C * By.transpose();
  r.witness = Field(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) r.witness(i, j) = W(i, j);
  return r;
}

Field inverse_laplacian(const Field& w, LaplacianKind kind) {
  const NeumannSpectral sp(w.grid());
  return inverse_laplacian_with(sp, laplacian_eigenvalues(sp, kind), w);
}

double hminus1_norm_sq(const Field& w, LaplacianKind kind) {
  Field m = w;
  remove_mean(m);
  return dot_w(m, inverse_laplacian(m, kind));
}

double rayleigh_quotient(const SpectralProblem& p, const DoubleWell& potential, const Field& w) {
  Field m = w;
  remove_mean(m);
  const Field F = scaled_fprime(p, potential);
  return dot_w(apply_form(p, F, m), m) / hminus1_norm_sq(m, p.laplacian);
}

DescentResult descent_min_rayleigh(const SpectralProblem& p, const DoubleWell& potential, int starts,
                                   std::uint64_t seed, int max_iterations, double tol) {
  check_problem(p);
  if (starts < 1) throw std::invalid_argument("descent_min_rayleigh: starts must be >= 1");
  const Grid2D& g = p.grid();
  const NeumannSpectral sp(g);
  const std::vector<double> lam = laplacian_eigenvalues(sp, p.laplacian);
  const Field F = scaled_fprime(p, potential);
  auto A = [&](const Field& w) { return apply_form(p, F, w); };
  auto B = [&](const Field& w) { return inverse_laplacian_with(sp, lam, w); };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DescentResult out;
  out.lambda_min = std::numeric_limits<double>::infinity();

  for (int s = 0; s < starts; ++s) {
    Field x(g);
    for (double& v : x.values()) v = normal(rng);
    remove_mean(x);
    Field prev_dir(g);
    bool have_prev = false;
    double lambda = std::numeric_limits<double>::infinity();
    int calm = 0, it = 0;
    for (; it < max_iterations; ++it) {
      const Field Ax = A(x), Bx = B(x);
      const double xBx = dot_w(x, Bx);
      const double rq = dot_w(x, Ax) / xBx;
      // projected gradient of the quotient, preconditioned by (-eps Delta)^-1
      Field r(g);
      for (std::size_t k = 0; k < r.size(); ++k) r[k] = Ax[k] - rq * Bx[k];
      remove_mean(r);
      Field dir = B(r);
      for (double& v : dir.values()) v /= p.epsilon;

      std::vector<Field> basis{x, dir};
      if (have_prev) basis.push_back(prev_dir);
      const int m = static_cast<int>(basis.size());
      std::vector<Field> Ab, Bb;
      for (const Field& b : basis) {
        Ab.push_back(A(b));
        Bb.push_back(B(b));
      }
      Eigen::MatrixXd As(m, m), Bs(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          As(a, b) = 0.5 * (dot_w(basis[a], Ab[b]) + dot_w(basis[b], Ab[a]));
          Bs(a, b) = 0.5 * (dot_w(basis[a], Bb[b]) + dot_w(basis[b], Bb[a]));
        }
      // drop near-dependent directions before the small eigensolve
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(Bs);
      const double bmax = eb.eigenvalues().maxCoeff();
      int keep = 0;
      for (int k = 0; k < m; ++k) keep += eb.eigenvalues()(k) > 1e-13 * bmax;
      const Eigen::MatrixXd V = eb.eigenvectors().rightCols(keep) *
                                eb.eigenvalues().tail(keep).cwiseSqrt().cwiseInverse().asDiagonal();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(V.transpose() * As * V);
      const Eigen::VectorXd y = V * ea.eigenvectors().col(0);
      const double lnew = ea.eigenvalues()(0);

      Field xn(g), dn(g);
      for (int a = 0; a < m; ++a)
        for (std::size_t k = 0; k < xn.size(); ++k) {
          xn[k] += y(a) * basis[a][k];
          if (a > 0) dn[k] += y(a) * basis[a][k];
        }
      const double nrm = std::sqrt(dot_w(xn, B(xn)));
      for (std::size_t k = 0; k < xn.size(); ++k) {
        xn[k] /= nrm;
        dn[k] /= nrm;
      }
      x = std::move(xn);
      prev_dir = std::move(dn);
      have_prev = true;
      const bool small = std::abs(lambda - lnew) <= tol * (1.0 + std::abs(lnew));
      lambda = lnew;
      calm = small ? calm + 1 : 0;
      if (calm >= 5) break;
    }
    out.per_start.push_back(lambda);
    out.lambda_min = std::min(out.lambda_min, lambda);
    out.max_iterations_used = std::max(out.max_iterations_used, it);
  }
  return out;
}

UniformityReport uniformity_report(const std::vector<double>& epsilons,
                                   const std::function<SpectralProblem(double)>& make,
                                   const DoubleWell& potential, int threads, double max_ratio) {
  if (epsilons.size() < 3) throw std::invalid_argument("uniformity_report: need at least 3 epsilons");
  const std::size_t n = epsilons.size();
  UniformityReport rep;
  rep.rows.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < n;) {
      try {
        const RayleighResult r = min_rayleigh(make(epsilons[k]), potential);
        rep.rows[k] = {epsilons[k], r.lambda_min, r.C()};
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int nt = std::clamp(threads, 1, static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  bool finite = true;
  for (const auto& row : rep.rows) {
    finite = finite && std::isfinite(row.C);
    cmin = std::min(cmin, row.C);
    cmax = std::max(cmax, row.C);
  }
  if (cmax == 0.0)
    rep.ratio = 1.0;
  else if (cmin == 0.0)
    rep.ratio = std::numeric_limits<double>::infinity();
  else
    rep.ratio = cmax / cmin;
  rep.passed = finite && rep.ratio <= max_ratio;
  return rep;
}

void write_csv(const UniformityReport& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "epsilon,lambda_min,C\n" << std::setprecision(17);
  for (const auto& row : r.rows) f << row.epsilon << ',' << row.lambda_min << ',' << row.C << '\n';
}

}  // namespace larche
