#include "larche/kernels.hpp"

namespace larche::kernels {
namespace {

void laplacian_neumann(const double* in, double* out, int nx, int ny, double ihx2, double ihy2) {
  for (int j = 0; j < ny; ++j) {
    const double* row = in + static_cast<std::size_t>(j) * nx;
    const double* dn = in + static_cast<std::size_t>(j == 0 ? 1 : j - 1) * nx;
    const double* up = in + static_cast<std::size_t>(j == ny - 1 ? ny - 2 : j + 1) * nx;
    double* o = out + static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const double l = row[i == 0 ? 1 : i - 1];
      const double r = row[i == nx - 1 ? nx - 2 : i + 1];
      o[i] = (l - 2.0 * row[i] + r) * ihx2 + (dn[i] - 2.0 * row[i] + up[i]) * ihy2;
    }
  }
}

void stencil9_add(const double* in, double* out, int nx, int ny, const double* c) {
  for (int j = 1; j < ny - 1; ++j) {
    const double* dn = in + static_cast<std::size_t>(j - 1) * nx;
    const double* md = in + static_cast<std::size_t>(j) * nx;
    const double* up = in + static_cast<std::size_t>(j + 1) * nx;
    double* o = out + static_cast<std::size_t>(j) * nx;
    for (int i = 1; i < nx - 1; ++i) {
      o[i] += c[0] * dn[i - 1] + c[1] * dn[i] + c[2] * dn[i + 1] + c[3] * md[i - 1] + c[4] * md[i] +
              c[5] * md[i + 1] + c[6] * up[i - 1] + c[7] * up[i] + c[8] * up[i + 1];
    }
  }
}

void poly_eval(const double* in, double* out, std::size_t n, const double* a, int m, double scale) {
  for (std::size_t k = 0; k < n; ++k) {
    const double x = in[k];
    double p = a[m - 1];
    for (int q = m - 2; q >= 0; --q) p = p * x + a[q];
    out[k] = scale * p;
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] = x[k] + a * y[k];
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
  return s;
}

void mode_update(const double* A, const double* x, const double* B, const double* y, double* out,
                 std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = A[k] * x[k] + B[k] * y[k];
}

}  // namespace

namespace detail {
const Table kScalarTable{Isa::scalar, "scalar", laplacian_neumann, stencil9_add, poly_eval,
                         axpy,        xpay,     dot,               mode_update};
}

}  // namespace larche::kernels
