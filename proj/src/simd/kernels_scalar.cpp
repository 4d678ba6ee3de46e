#include "dk/simd/kernels.hpp"

#include <cmath>

namespace dk::simd {
namespace {

double sum_s(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sum_abs_s(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double sum_abs_diff_s(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double dot_s(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_s(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double max_abs_s(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

void axpy_s(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void xpay_s(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void mul_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + a[i] * b[i];
}

void scale_s(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void cmul_real_s(const double* f, const double* sym, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    out[2 * k] = f[2 * k] * sym[k];
    out[2 * k + 1] = f[2 * k + 1] * sym[k];
  }
}

// i * s * (re + i im) = -s*im + i s*re
void cmul_i_real_s(const double* f, const double* sym, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double re = f[2 * k];
    const double im = f[2 * k + 1];
    out[2 * k] = -(sym[k] * im);
    out[2 * k + 1] = sym[k] * re;
  }
}

void cmul_i_real_add_s(const double* f, const double* sym, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double re = f[2 * k];
    const double im = f[2 * k + 1];
    out[2 * k] = out[2 * k] - sym[k] * im;
    out[2 * k + 1] = out[2 * k + 1] + sym[k] * re;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar,   sum_s,       sum_abs_s,     sum_abs_diff_s,
                                 dot_s,         weighted_dot_s, max_abs_s,  axpy_s,
                                 xpay_s,        mul_s,       mul_add_s,     scale_s,
                                 cmul_real_s,   cmul_i_real_s, cmul_i_real_add_s};
  return table;
}

}  // namespace dk::simd
