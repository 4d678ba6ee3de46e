// AVX2 variants of the kernels in kernels_scalar.cpp. This file is compiled
// with -mavx2 and only reached after a runtime CPU check.
#include "dk/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace dk::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d vabs(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double sum_v(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_abs_v(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, vabs(_mm256_loadu_pd(x + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double sum_abs_diff_v(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double dot_v(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_v(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wa, _mm256_loadu_pd(b + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double max_abs_v(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, vabs(_mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

void axpy_v(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void xpay_v(const double* x, double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void mul_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), p));
  }
  for (; i < n; ++i) out[i] = out[i] + a[i] * b[i];
}

void scale_v(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

// Two complex values per register: lanes (re0, im0, re1, im1).
inline __m256d load_sym_pair(const double* sym, std::size_t k) {
  const __m128d s = _mm_loadu_pd(sym + k);  // (s0, s1)
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(s), 0b01010000);  // (s0, s0, s1, s1)
}

void cmul_real_v(const double* f, const double* sym, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    _mm256_storeu_pd(out + 2 * k, _mm256_mul_pd(_mm256_loadu_pd(f + 2 * k), load_sym_pair(sym, k)));
  }
  for (; k < n; ++k) {
    out[2 * k] = f[2 * k] * sym[k];
    out[2 * k + 1] = f[2 * k + 1] * sym[k];
  }
}

// (re, im) -> (-s*im, s*re)
inline __m256d i_times(__m256d fv, __m256d sv) {
  const __m256d swapped = _mm256_permute_pd(fv, 0b0101);  // (im0, re0, im1, re1)
  const __m256d prod = _mm256_mul_pd(swapped, sv);
  const __m256d signs = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
  return _mm256_xor_pd(prod, signs);
}

void cmul_i_real_v(const double* f, const double* sym, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    _mm256_storeu_pd(out + 2 * k, i_times(_mm256_loadu_pd(f + 2 * k), load_sym_pair(sym, k)));
  }
  for (; k < n; ++k) {
    const double re = f[2 * k];
    const double im = f[2 * k + 1];
    out[2 * k] = -(sym[k] * im);
    out[2 * k + 1] = sym[k] * re;
  }
}

void cmul_i_real_add_v(const double* f, const double* sym, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d t = i_times(_mm256_loadu_pd(f + 2 * k), load_sym_pair(sym, k));
    _mm256_storeu_pd(out + 2 * k, _mm256_add_pd(_mm256_loadu_pd(out + 2 * k), t));
  }
  for (; k < n; ++k) {
    const double re = f[2 * k];
    const double im = f[2 * k + 1];
    out[2 * k] = out[2 * k] - sym[k] * im;
    out[2 * k + 1] = out[2 * k + 1] + sym[k] * re;
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::avx2,     sum_v,         sum_abs_v,   sum_abs_diff_v,
                                 dot_v,         weighted_dot_v, max_abs_v,  axpy_v,
                                 xpay_v,        mul_v,         mul_add_v,   scale_v,
                                 cmul_real_v,   cmul_i_real_v, cmul_i_real_add_v};
  return table;
}

}  // namespace dk::simd
