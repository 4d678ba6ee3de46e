#include "dk/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dk::simd {

#ifdef DK_HAVE_AVX2
const KernelTable& avx2_kernels();
#endif

const KernelTable* avx2_table() {
#ifdef DK_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported ? &avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* select_default() {
  if (const char* env = std::getenv("DK_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2" && avx2_table() != nullptr) return avx2_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{select_default()};
  return table;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd kernel: span length mismatch");
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    current().store(&scalar_table());
    return;
  }
  const KernelTable* t = avx2_table();
  if (t == nullptr) throw std::runtime_error("AVX2 kernels unavailable on this build or CPU");
  current().store(t);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active().sum_abs_diff(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  check_sizes(w.size(), a.size());
  check_sizes(a.size(), b.size());
  return active().weighted_dot(w.data(), a.data(), b.data(), a.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

void xpay(std::span<const double> x, double a, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().xpay(x.data(), a, y.data(), x.size());
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  check_sizes(a.size(), b.size());
  check_sizes(a.size(), out.size());
  active().mul(a.data(), b.data(), out.data(), a.size());
}

void mul_add(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  check_sizes(a.size(), b.size());
  check_sizes(a.size(), out.size());
  active().mul_add(a.data(), b.data(), out.data(), a.size());
}

namespace {
const double* raw(std::span<const cplx> z) { return reinterpret_cast<const double*>(z.data()); }
double* raw(std::span<cplx> z) { return reinterpret_cast<double*>(z.data()); }
}  // namespace

void cmul_real(std::span<const cplx> f, std::span<const double> sym, std::span<cplx> out) {
  check_sizes(f.size(), sym.size());
  check_sizes(f.size(), out.size());
  active().cmul_real(raw(f), sym.data(), raw(out), f.size());
}

void cmul_i_real(std::span<const cplx> f, std::span<const double> sym, std::span<cplx> out) {
  check_sizes(f.size(), sym.size());
  check_sizes(f.size(), out.size());
  active().cmul_i_real(raw(f), sym.data(), raw(out), f.size());
}

void cmul_i_real_add(std::span<const cplx> f, std::span<const double> sym, std::span<cplx> out) {
  check_sizes(f.size(), sym.size());
  check_sizes(f.size(), out.size());
  active().cmul_i_real_add(raw(f), sym.data(), raw(out), f.size());
}

}  // namespace dk::simd
