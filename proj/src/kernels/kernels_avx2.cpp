// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "larche/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace larche::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void laplacian_neumann(const double* in, double* out, int nx, int ny, double ihx2, double ihy2) {
  const __m256d vx = _mm256_set1_pd(ihx2);
  const __m256d vy = _mm256_set1_pd(ihy2);
  const __m256d two = _mm256_set1_pd(2.0);
  for (int j = 0; j < ny; ++j) {
    const double* row = in + static_cast<std::size_t>(j) * nx;
    const double* dn = in + static_cast<std::size_t>(j == 0 ? 1 : j - 1) * nx;
    const double* up = in + static_cast<std::size_t>(j == ny - 1 ? ny - 2 : j + 1) * nx;
    double* o = out + static_cast<std::size_t>(j) * nx;
    o[0] = (2.0 * row[1] - 2.0 * row[0]) * ihx2 + (dn[0] - 2.0 * row[0] + up[0]) * ihy2;
    int i = 1;
    for (; i + 4 <= nx - 1; i += 4) {
      const __m256d c = _mm256_loadu_pd(row + i);
      const __m256d l = _mm256_loadu_pd(row + i - 1);
      const __m256d r = _mm256_loadu_pd(row + i + 1);
      const __m256d d = _mm256_loadu_pd(dn + i);
      const __m256d u = _mm256_loadu_pd(up + i);
      const __m256d c2 = _mm256_mul_pd(two, c);
      const __m256d xx = _mm256_sub_pd(_mm256_add_pd(l, r), c2);
      const __m256d yy = _mm256_sub_pd(_mm256_add_pd(d, u), c2);
      _mm256_storeu_pd(o + i, _mm256_fmadd_pd(xx, vx, _mm256_mul_pd(yy, vy)));
    }
    for (; i < nx - 1; ++i) {
      o[i] = (row[i - 1] - 2.0 * row[i] + row[i + 1]) * ihx2 + (dn[i] - 2.0 * row[i] + up[i]) * ihy2;
    }
    const int e = nx - 1;
    o[e] = (2.0 * row[e - 1] - 2.0 * row[e]) * ihx2 + (dn[e] - 2.0 * row[e] + up[e]) * ihy2;
  }
}

void stencil9_add(const double* in, double* out, int nx, int ny, const double* c) {
  __m256d k[9];
  for (int q = 0; q < 9; ++q) k[q] = _mm256_set1_pd(c[q]);
  for (int j = 1; j < ny - 1; ++j) {
    const double* dn = in + static_cast<std::size_t>(j - 1) * nx;
    const double* md = in + static_cast<std::size_t>(j) * nx;
    const double* up = in + static_cast<std::size_t>(j + 1) * nx;
    double* o = out + static_cast<std::size_t>(j) * nx;
    int i = 1;
    for (; i + 4 <= nx - 1; i += 4) {
      __m256d acc = _mm256_loadu_pd(o + i);
      acc = _mm256_fmadd_pd(k[0], _mm256_loadu_pd(dn + i - 1), acc);
      acc = _mm256_fmadd_pd(k[1], _mm256_loadu_pd(dn + i), acc);
      acc = _mm256_fmadd_pd(k[2], _mm256_loadu_pd(dn + i + 1), acc);
      acc = _mm256_fmadd_pd(k[3], _mm256_loadu_pd(md + i - 1), acc);
      acc = _mm256_fmadd_pd(k[4], _mm256_loadu_pd(md + i), acc);
      acc = _mm256_fmadd_pd(k[5], _mm256_loadu_pd(md + i + 1), acc);
      acc = _mm256_fmadd_pd(k[6], _mm256_loadu_pd(up + i - 1), acc);
      acc = _mm256_fmadd_pd(k[7], _mm256_loadu_pd(up + i), acc);
      acc = _mm256_fmadd_pd(k[8], _mm256_loadu_pd(up + i + 1), acc);
      _mm256_storeu_pd(o + i, acc);
    }
    for (; i < nx - 1; ++i) {
      o[i] += c[0] * dn[i - 1] + c[1] * dn[i] + c[2] * dn[i + 1] + c[3] * md[i - 1] + c[4] * md[i] +
              c[5] * md[i + 1] + c[6] * up[i - 1] + c[7] * up[i] + c[8] * up[i + 1];
    }
  }
}

void poly_eval(const double* in, double* out, std::size_t n, const double* a, int m, double scale) {
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(in + k);
    __m256d p = _mm256_set1_pd(a[m - 1]);
    for (int q = m - 2; q >= 0; --q) p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(a[q]));
    _mm256_storeu_pd(out + k, _mm256_mul_pd(s, p));
  }
  for (; k < n; ++k) {
    const double x = in[k];
    double p = a[m - 1];
    for (int q = m - 2; q >= 0; --q) p = p * x + a[q];
    out[k] = scale * p;
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  for (; k < n; ++k) y[k] += a * x[k];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + k), _mm256_loadu_pd(x + k)));
  for (; k < n; ++k) y[k] = x[k] + a * y[k];
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k + 4), _mm256_loadu_pd(y + k + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; k < n; ++k) s += x[k] * y[k];
  return s;
}

void mode_update(const double* A, const double* x, const double* B, const double* y, double* out,
                 std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d ax = _mm256_mul_pd(_mm256_loadu_pd(A + k), _mm256_loadu_pd(x + k));
    _mm256_storeu_pd(out + k, _mm256_fmadd_pd(_mm256_loadu_pd(B + k), _mm256_loadu_pd(y + k), ax));
  }
  for (; k < n; ++k) out[k] = A[k] * x[k] + B[k] * y[k];
}

const Table kAvx2Table{Isa::avx2, "avx2", laplacian_neumann, stencil9_add, poly_eval,
                       axpy,      xpay,   dot,               mode_update};

}  // namespace

namespace detail {
const Table* avx2_table() { return &kAvx2Table; }
}  // namespace detail

}  // namespace larche::kernels

#else

namespace larche::kernels::detail {
const Table* avx2_table() { return nullptr; }
}  // namespace larche::kernels::detail

#endif
