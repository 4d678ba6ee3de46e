#pragma once
// Data-parallel inner loops shared by the grid, solver and elliptic code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2 variant. The variant is chosen once at startup from the CPU
// capabilities (override with DK_SIMD=scalar|avx2) and can be switched
// in tests with force_isa().
//
// Elementwise kernels are bit-identical across variants. Reductions
// accumulate in four lanes on AVX2, so they agree with the scalar
// reference only to rounding.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace dk::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  double (*sum)(const double*, std::size_t);
  double (*sum_abs)(const double*, std::size_t);
  double (*sum_abs_diff)(const double*, const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*weighted_dot)(const double*, const double*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*xpay)(const double*, double, double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  void (*mul_add)(const double*, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  // Complex arrays are passed as interleaved (re, im) doubles; n counts complex values.
  void (*cmul_real)(const double*, const double*, double*, std::size_t);
  void (*cmul_i_real)(const double*, const double*, double*, std::size_t);
  void (*cmul_i_real_add)(const double*, const double*, double*, std::size_t);
};

const KernelTable& scalar_table();
// Returns nullptr when the AVX2 variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

const KernelTable& active();
Isa active_isa();
void force_isa(Isa isa);  // throws if the requested variant is unavailable
std::string_view isa_name(Isa isa);

// Convenience wrappers over the active table.
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double sum_abs(std::span<const double> x) { return active().sum_abs(x.data(), x.size()); }
double sum_abs_diff(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
// sum_i w_i * a_i * b_i
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
inline double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y = x + a * y
void xpay(std::span<const double> x, double a, std::span<double> y);
// out = a * b
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);
// out += a * b
void mul_add(std::span<const double> a, std::span<const double> b, std::span<double> out);
inline void scale(double a, std::span<double> x) { active().scale(a, x.data(), x.size()); }

// out_k = f_k * sym_k
void cmul_real(std::span<const cplx> f, std::span<const double> sym, std::span<cplx> out);
// out_k = i * sym_k * f_k
void cmul_i_real(std::span<const cplx> f, std::span<const double> sym, std::span<cplx> out);
// out_k += i * sym_k * f_k
void cmul_i_real_add(std::span<const cplx> f, std::span<const double> sym, std::span<cplx> out);

}  // namespace dk::simd
