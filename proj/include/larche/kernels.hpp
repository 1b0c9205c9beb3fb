#pragma once

// Data-parallel inner loops shared by the stepper, the elastic solver and the
// spectral module. Every kernel has a scalar reference implementation; an AVX2
// variant is selected at runtime when the CPU supports it. Set
// LARCHE_SIMD=scalar to force the reference path.

#include <cstddef>
#include <string_view>

namespace larche::kernels {

enum class Isa { scalar, avx2 };

struct Table {
  Isa isa;
  const char* name;

  /// out = Delta_h in, 5-point stencil with mirror ghosts (homogeneous Neumann).
  void (*laplacian_neumann)(const double* in, double* out, int nx, int ny, double inv_hx2,
                            double inv_hy2);
  /// out += sum_{dj,di in -1..1} coef[(dj+1)*3 + di+1] * in[j+dj][i+di] on interior nodes.
  void (*stencil9_add)(const double* in, double* out, int nx, int ny, const double* coef);
  /// out = scale * sum_k coeffs[k] in^k (Horner), ncoef >= 1.
  void (*poly_eval)(const double* in, double* out, std::size_t n, const double* coeffs, int ncoef,
                    double scale);
  /// y += a x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// y = x + a y
  void (*xpay)(const double* x, double a, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// out = A x + B y, elementwise.
  void (*mode_update)(const double* A, const double* x, const double* B, const double* y,
                      double* out, std::size_t n);
};

const Table& scalar();
/// nullptr when AVX2+FMA is unavailable at build or run time.
const Table* avx2();
/// Table chosen at first use; honours LARCHE_SIMD.
const Table& active();
/// Select a table by name ("scalar" or "avx2"); returns false if unavailable.
bool select(std::string_view name);

namespace detail {
extern const Table kScalarTable;
const Table* avx2_table();
}  // namespace detail

}  // namespace larche::kernels
