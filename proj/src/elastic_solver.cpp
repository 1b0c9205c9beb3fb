#include "larche/elastic_solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "larche/kernels.hpp"

namespace larche {
namespace {

constexpr int kOff[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};

struct Shape {
  double N[4];
  double dx[4];
  double dy[4];
};

Shape shape(double xi, double eta, double hx, double hy) {
  Shape s;
  s.N[0] = (1 - xi) * (1 - eta);
  s.N[1] = xi * (1 - eta);
  s.N[2] = (1 - xi) * eta;
  s.N[3] = xi * eta;
  s.dx[0] = -(1 - eta) / hx;
  s.dx[1] = (1 - eta) / hx;
  s.dx[2] = -eta / hx;
  s.dx[3] = eta / hx;
  s.dy[0] = -(1 - xi) / hy;
  s.dy[1] = -xi / hy;
  s.dy[2] = (1 - xi) / hy;
  s.dy[3] = xi / hy;
  return s;
}

}  // namespace

ElasticSolver::ElasticSolver(const Grid2D& g, const ElasticityTensor& C, const Eigenstrain& E)
    : grid_(g), C_(C), E_(E) {
  const double hx = g.hx(), hy = g.hy();
  const auto gam = to_voigt_strain(E.matrix());
  double Vg[3];
  for (int r = 0; r < 3; ++r) Vg[r] = C.voigt(r, 0) * gam[0] + C.voigt(r, 1) * gam[1] + C.voigt(r, 2) * gam[2];
  kappa_ = gam[0] * Vg[0] + gam[1] * Vg[1] + gam[2] * Vg[2];

  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  const double w = 0.25 * hx * hy;
  for (double xi : gp) {
    for (double eta : gp) {
      const Shape s = shape(xi, eta, hx, hy);
      double B[3][8] = {};
      for (int a = 0; a < 4; ++a) {
        B[0][2 * a] = s.dx[a];
        B[2][2 * a] = s.dy[a];
        B[1][2 * a + 1] = s.dy[a];
        B[2][2 * a + 1] = s.dx[a];
      }
      double VB[3][8] = {};
      for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 8; ++k)
          for (int m = 0; m < 3; ++m) VB[r][k] += C.voigt(r, m) * B[m][k];
      for (int p = 0; p < 8; ++p) {
        for (int q = 0; q < 8; ++q) {
          double v = 0.0;
          for (int r = 0; r < 3; ++r) v += B[r][p] * VB[r][q];
          Ke_[p * 8 + q] += w * v;
        }
        const double bvg = B[0][p] * Vg[0] + B[1][p] * Vg[1] + B[2][p] * Vg[2];
        for (int b = 0; b < 4; ++b) Ge_[p * 4 + b] += w * bvg * s.N[b];
      }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) Me_[a * 4 + b] += w * s.N[a] * s.N[b];
    }
  }

  // Interior stencils: node P is local node a of the four cells around it.
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const int di = kOff[b][0] - kOff[a][0];
      const int dj = kOff[b][1] - kOff[a][1];
      const int slot = (dj + 1) * 3 + (di + 1);
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) Kst_[p][q][slot] += Ke_[(2 * a + p) * 8 + 2 * b + q];
        Gst_[p][slot] += Ge_[(2 * a + p) * 4 + b];
      }
    }
  }
  pre_ = std::make_unique<DirichletSpectral>(g.nx() - 2, g.ny() - 2, hx, hy);
}

struct ElasticSolver::Direct {
  std::vector<int> dof;  // grid index -> interior unknown, -1 on the boundary
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

ElasticSolver::~ElasticSolver() = default;

void ElasticSolver::apply_interior(const double* ux, const double* uy, double* ox, double* oy) const {
  const auto& kt = kernels::active();
  const int nx = grid_.nx(), ny = grid_.ny();
  std::fill(ox, ox + grid_.size(), 0.0);
  std::fill(oy, oy + grid_.size(), 0.0);
  kt.stencil9_add(ux, ox, nx, ny, Kst_[0][0].data());
  kt.stencil9_add(uy, ox, nx, ny, Kst_[0][1].data());
  kt.stencil9_add(ux, oy, nx, ny, Kst_[1][0].data());
  kt.stencil9_add(uy, oy, nx, ny, Kst_[1][1].data());
}

void ElasticSolver::precondition(const double* rx, const double* ry, double* zx, double* zy) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  const int mx = nx - 2, my = ny - 2;
  std::vector<double> in(static_cast<std::size_t>(mx) * my), out(in.size());
  const double scale = grid_.hx() * grid_.hy();
  auto one = [&](const double* r, double* z, double ax, double ay) {
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i) in[j * mx + i] = r[grid_.index(i + 1, j + 1)];
    pre_->solve(ax, ay, scale, in.data(), out.data());
    std::fill(z, z + grid_.size(), 0.0);
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i) z[grid_.index(i + 1, j + 1)] = out[j * mx + i];
  };
  one(rx, zx, C_.voigt(0, 0), C_.voigt(2, 2));
  one(ry, zy, C_.voigt(2, 2), C_.voigt(1, 1));
}

VectorField ElasticSolver::solve(const Field& c, double tol, const VectorField* body_force,
                                 const VectorField* boundary, const VectorField* guess, int max_iter) {
  if (!(c.grid() == grid_)) throw std::invalid_argument("ElasticSolver: grid mismatch");
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("ElasticSolver: tol must be in (0, 1)");
  if (!all_finite(c)) throw std::invalid_argument("ElasticSolver: non-finite concentration");
  const auto& kt = kernels::active();
  const int nx = grid_.nx(), ny = grid_.ny();
  const std::size_t N = grid_.size();
  auto interior = [&](std::size_t k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    return i > 0 && j > 0 && i < nx - 1 && j < ny - 1;
  };

  // Right-hand side b = G c + M_lumped f - K u_D on interior rows.
  std::vector<double> b(2 * N, 0.0);
  kt.stencil9_add(c.data(), b.data(), nx, ny, Gst_[0].data());
  kt.stencil9_add(c.data(), b.data() + N, nx, ny, Gst_[1].data());
  const double area = grid_.hx() * grid_.hy();
  if (body_force) {
    for (std::size_t k = 0; k < N; ++k) {
      if (!interior(k)) continue;
      b[k] += area * body_force->x[k];
      b[N + k] += area * body_force->y[k];
    }
  }
  VectorField uD(grid_);
  if (boundary) {
    for (std::size_t k = 0; k < N; ++k) {
      if (interior(k)) continue;
      uD.x[k] = boundary->x[k];
      uD.y[k] = boundary->y[k];
    }
    std::vector<double> t(2 * N);
    apply_interior(uD.x.data(), uD.y.data(), t.data(), t.data() + N);
    kt.axpy(-1.0, t.data(), b.data(), 2 * N);
  }

  std::vector<double> x(2 * N, 0.0), r(2 * N), z(2 * N), p(2 * N), q(2 * N);
  const std::size_t M = static_cast<std::size_t>(nx - 2) * (ny - 2);
  if (!direct_ && solves_ >= 1 && 2 * M <= kDirectMaxDofs) {
    auto d = std::make_unique<Direct>();
    d->dof.assign(N, -1);
    int m = 0;
    for (std::size_t k = 0; k < N; ++k)
      if (interior(k)) d->dof[k] = m++;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * M * 18);
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const int row = d->dof[grid_.index(i, j)];
        for (int slot = 0; slot < 9; ++slot) {
          const int col = d->dof[grid_.index(i + slot % 3 - 1, j + slot / 3 - 1)];
          if (col < 0) continue;
          for (int pp = 0; pp < 2; ++pp)
            for (int qq = 0; qq < 2; ++qq) t.emplace_back(pp * m + row, qq * m + col, Kst_[pp][qq][slot]);
        }
      }
    Eigen::SparseMatrix<double> K(2 * m, 2 * m);
    K.setFromTriplets(t.begin(), t.end());
    d->ldlt.compute(K);
    if (d->ldlt.info() != Eigen::Success) throw std::runtime_error("ElasticSolver: factorization of K failed");
    direct_ = std::move(d);
  }
  ++solves_;
  stats_ = {};
  if (direct_) {
    const int m = static_cast<int>(M);
    Eigen::VectorXd rhs(2 * m);
    for (std::size_t k = 0; k < N; ++k)
      if (const int e = direct_->dof[k]; e >= 0) {
        rhs[e] = b[k];
        rhs[m + e] = b[N + k];
      }
    const Eigen::VectorXd sol = direct_->ldlt.solve(rhs);
    for (std::size_t k = 0; k < N; ++k)
      if (const int e = direct_->dof[k]; e >= 0) {
        x[k] = sol[e];
        x[N + k] = sol[m + e];
      }
    stats_.direct = true;
  } else if (guess) {
    for (std::size_t k = 0; k < N; ++k) {
      if (!interior(k)) continue;
      x[k] = guess->x[k];
      x[N + k] = guess->y[k];
    }
  }
  apply_interior(x.data(), x.data() + N, q.data(), q.data() + N);
  for (std::size_t k = 0; k < 2 * N; ++k) r[k] = b[k] - q[k];

  stats_.rhs_norm = std::sqrt(kt.dot(b.data(), b.data(), 2 * N));
  const double target = tol * stats_.rhs_norm;
  double rn = std::sqrt(kt.dot(r.data(), r.data(), 2 * N));
  int it = 0;
  if (rn > target) {
    precondition(r.data(), r.data() + N, z.data(), z.data() + N);
    p = z;
    double rz = kt.dot(r.data(), z.data(), 2 * N);
    for (it = 1; it <= max_iter; ++it) {
      apply_interior(p.data(), p.data() + N, q.data(), q.data() + N);
      const double pq = kt.dot(p.data(), q.data(), 2 * N);
      if (!(pq > 0.0)) throw std::runtime_error("ElasticSolver: CG breakdown (operator not SPD)");
      const double alpha = rz / pq;
      kt.axpy(alpha, p.data(), x.data(), 2 * N);
      kt.axpy(-alpha, q.data(), r.data(), 2 * N);
      rn = std::sqrt(kt.dot(r.data(), r.data(), 2 * N));
      if (rn <= target) break;
      precondition(r.data(), r.data() + N, z.data(), z.data() + N);
      const double rz_new = kt.dot(r.data(), z.data(), 2 * N);
      kt.xpay(z.data(), rz_new / rz, p.data(), 2 * N);
      rz = rz_new;
    }
    if (it > max_iter)
      throw std::runtime_error("ElasticSolver: CG did not converge in " + std::to_string(max_iter) +
                               " iterations (residual " + std::to_string(rn) + ")");
  }
  stats_.iterations = it;
  stats_.residual = rn;

  VectorField u(grid_);
  for (std::size_t k = 0; k < N; ++k) {
    u.x[k] = uD.x[k] + x[k];
    u.y[k] = uD.y[k] + x[N + k];
  }
  return u;
}

double ElasticSolver::energy(const VectorField& u, const Field& c) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  double e = 0.0;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      double ue[8], ce[4];
      for (int a = 0; a < 4; ++a) {
        const std::size_t k = grid_.index(i + kOff[a][0], j + kOff[a][1]);
        ue[2 * a] = u.x[k];
        ue[2 * a + 1] = u.y[k];
        ce[a] = c[k];
      }
      for (int p = 0; p < 8; ++p) {
        double ku = 0.0, gc = 0.0;
        for (int q = 0; q < 8; ++q) ku += Ke_[p * 8 + q] * ue[q];
        for (int b = 0; b < 4; ++b) gc += Ge_[p * 4 + b] * ce[b];
        e += ue[p] * (0.5 * ku - gc);
      }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) e += 0.5 * kappa_ * ce[a] * Me_[a * 4 + b] * ce[b];
    }
  }
  return e;
}

Field ElasticSolver::dWdc(const VectorField& u, const Field& c) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  Field out(grid_);
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      double ue[8], ce[4];
      std::size_t ks[4];
      for (int a = 0; a < 4; ++a) {
        ks[a] = grid_.index(i + kOff[a][0], j + kOff[a][1]);
        ue[2 * a] = u.x[ks[a]];
        ue[2 * a + 1] = u.y[ks[a]];
        ce[a] = c[ks[a]];
      }
      for (int b = 0; b < 4; ++b) {
        double v = 0.0;
        for (int p = 0; p < 8; ++p) v -= Ge_[p * 4 + b] * ue[p];
        for (int a = 0; a < 4; ++a) v += kappa_ * Me_[b * 4 + a] * ce[a];
        out[ks[b]] += v;
      }
    }
  }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out(i, j) /= grid_.node_weight(i, j);
  return out;
}

VectorField ElasticSolver::apply_K(const VectorField& u) const {
  VectorField o(grid_);
  apply_interior(u.x.data(), u.y.data(), o.x.data(), o.y.data());
  return o;
}

VectorField ElasticSolver::divergence_of_stress(const VectorField& u, const Field& c) const {
  const auto& kt = kernels::active();
  VectorField o(grid_);
  apply_interior(u.x.data(), u.y.data(), o.x.data(), o.y.data());
  const std::size_t N = grid_.size();
  std::vector<double> gc(2 * N, 0.0);
  kt.stencil9_add(c.data(), gc.data(), grid_.nx(), grid_.ny(), Gst_[0].data());
  kt.stencil9_add(c.data(), gc.data() + N, grid_.nx(), grid_.ny(), Gst_[1].data());
  const double ia = 1.0 / (grid_.hx() * grid_.hy());
  for (std::size_t k = 0; k < N; ++k) {
    o.x[k] = (gc[k] - o.x[k]) * ia;
    o.y[k] = (gc[N + k] - o.y[k]) * ia;
  }
  return o;
}

VectorField solve_displacement(const ElasticityTensor& C, const Eigenstrain& E, const Field& c, double tol) {
  if (!(tol > 1e-12 && tol < 1e-4)) throw std::invalid_argument("solve_displacement: tol must be in (1e-12, 1e-4)");
  ElasticSolver s(c.grid(), C, E);
  return s.solve(c, tol);
}

}  // namespace larche
