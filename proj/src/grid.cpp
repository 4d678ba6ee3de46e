#include "dk/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dk {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

thread_local std::vector<cplx> scratch_in;
thread_local std::vector<cplx> scratch_out;

std::span<cplx> scratch(std::vector<cplx>& buf, std::size_t n) {
  if (buf.size() < n) buf.resize(n);
  return {buf.data(), n};
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct TorusGrid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Plans(int d, int n) {
    std::vector<int> dims(static_cast<std::size_t>(d), n);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    std::vector<cplx> a(total), b(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft(d, dims.data(), as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    backward = fftw_plan_dft(d, dims.data(), as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
    if (forward == nullptr || backward == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

GridPtr TorusGrid::make(int d, int n) {
  if (d < 1 || d > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3 (got " + std::to_string(d) + ")");
  if (n < 8) throw std::invalid_argument("grid: n must be >= 8 (got " + std::to_string(n) + ")");
  if (n % 2 != 0) throw std::invalid_argument("grid: n must be even (got " + std::to_string(n) + ")");
  return GridPtr(new TorusGrid(d, n));
}

TorusGrid::TorusGrid(int d, int n)
    : d_(d), n_(n), h_(1.0 / n), size_(1), cell_volume_(1.0) {
  for (int i = 0; i < d; ++i) {
    size_ *= static_cast<std::size_t>(n);
    cell_volume_ *= h_;
  }
  modes_.resize(size_ * static_cast<std::size_t>(d));
  deriv_.assign(static_cast<std::size_t>(d), std::vector<double>(size_));
  laplacian_.assign(size_, 0.0);
  knorm2_.assign(size_, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t idx = 0; idx < size_; ++idx) {
    double lap = 0.0;
    double k2 = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      const int j = node_index(idx, axis);
      const int k = j < n / 2 ? j : j - n;
      modes_[idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(axis)] = k;
      const double sym = (k == -n / 2) ? 0.0 : two_pi * k;
      deriv_[static_cast<std::size_t>(axis)][idx] = sym;
      lap -= sym * sym;
      k2 += static_cast<double>(k) * k;
    }
    laplacian_[idx] = lap;
    knorm2_[idx] = k2;
  }
  plans_ = std::make_unique<Plans>(d, n);
}

TorusGrid::~TorusGrid() = default;

int TorusGrid::node_index(std::size_t idx, int axis) const {
  std::size_t stride = 1;
  for (int a = d_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(n_);
  return static_cast<int>((idx / stride) % static_cast<std::size_t>(n_));
}

void TorusGrid::forward(std::span<const double> in, std::span<cplx> out) const {
  auto buf = scratch(scratch_in, size_);
  for (std::size_t i = 0; i < size_; ++i) buf[i] = cplx(in[i], 0.0);
  fftw_execute_dft(plans_->forward, as_fftw(buf.data()), as_fftw(out.data()));
}

void TorusGrid::forward(std::span<const cplx> in, std::span<cplx> out) const {
  auto buf = scratch(scratch_in, size_);
  std::copy(in.begin(), in.end(), buf.begin());
  fftw_execute_dft(plans_->forward, as_fftw(buf.data()), as_fftw(out.data()));
}

void TorusGrid::inverse(std::span<const cplx> in, std::span<double> out) const {
  auto src = scratch(scratch_in, size_);
  auto dst = scratch(scratch_out, size_);
  std::copy(in.begin(), in.end(), src.begin());
  fftw_execute_dft(plans_->backward, as_fftw(src.data()), as_fftw(dst.data()));
  const double inv = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = dst[i].real() * inv;
}

void TorusGrid::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  auto src = scratch(scratch_in, size_);
  std::copy(in.begin(), in.end(), src.begin());
  fftw_execute_dft(plans_->backward, as_fftw(src.data()), as_fftw(out.data()));
  const double inv = 1.0 / static_cast<double>(size_);
  for (auto& z : out) z *= inv;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw std::invalid_argument("ScalarField: value count does not match grid");
}

double ScalarField::mass() const { return grid_->cell_volume() * simd::sum(values_); }

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

VectorField::VectorField(GridPtr grid)
    : grid_(std::move(grid)), data_(grid_->size() * static_cast<std::size_t>(grid_->dim()), 0.0) {}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": grid mismatch (" + std::to_string(a.dim()) + "x" +
                                std::to_string(a.n()) + " vs " + std::to_string(b.dim()) + "x" +
                                std::to_string(b.n()) + ")");
  }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<cplx> spectrum(const TorusGrid& g, std::span<const double> f) {
  std::vector<cplx> out(g.size());
  g.forward(f, out);
  return out;
}

}  // namespace

VectorField periodic_convolve(const VectorField& V, const ScalarField& rho) {
  require_same_grid(V.grid(), rho.grid(), "periodic_convolve");
  const TorusGrid& g = rho.grid();
  const auto rho_hat = spectrum(g, rho.values());
  VectorField out(rho.grid_ptr());
  std::vector<cplx> prod(g.size());
  const double hd = g.cell_volume();
  for (int c = 0; c < V.components(); ++c) {
    const auto v_hat = spectrum(g, V.component(c));
    for (std::size_t k = 0; k < g.size(); ++k) prod[k] = v_hat[k] * rho_hat[k];
    g.inverse(prod, out.component(c));
    simd::scale(hd, out.component(c));
  }
  return out;
}

ScalarField periodic_convolve(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "periodic_convolve");
  const TorusGrid& g = a.grid();
  auto a_hat = spectrum(g, a.values());
  const auto b_hat = spectrum(g, b.values());
  for (std::size_t k = 0; k < g.size(); ++k) a_hat[k] *= b_hat[k];
  ScalarField out(a.grid_ptr());
  g.inverse(a_hat, out.values());
  simd::scale(g.cell_volume(), out.values());
  return out;
}

VectorField gradient(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  const auto f_hat = spectrum(g, f.values());
  VectorField out(f.grid_ptr());
  std::vector<cplx> tmp(g.size());
  for (int c = 0; c < g.dim(); ++c) {
    simd::cmul_i_real(f_hat, g.deriv_symbol(c), tmp);
    g.inverse(tmp, out.component(c));
  }
  return out;
}

ScalarField divergence(const VectorField& F) {
  const TorusGrid& g = F.grid();
  std::vector<cplx> acc(g.size(), cplx(0.0, 0.0));
  std::vector<cplx> comp(g.size());
  for (int c = 0; c < g.dim(); ++c) {
    g.forward(F.component(c), comp);
    simd::cmul_i_real_add(comp, g.deriv_symbol(c), acc);
  }
  ScalarField out(F.grid_ptr());
  g.inverse(acc, out.values());
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  auto f_hat = spectrum(g, f.values());
  simd::cmul_real(f_hat, g.laplacian_symbol(), f_hat);
  ScalarField out(f.grid_ptr());
  g.inverse(f_hat, out.values());
  return out;
}

VectorField grad_sqrt(const ScalarField& rho, double floor) {
  ScalarField root(rho.grid_ptr());
  for (std::size_t i = 0; i < rho.size(); ++i) root[i] = std::sqrt(std::max(rho[i], floor));
  return gradient(root);
}

namespace {

double lp_from_magnitudes(const TorusGrid& g, std::span<const double> mag, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return simd::max_abs(mag);
  if (p == 1.0) return g.cell_volume() * simd::sum_abs(mag);
  if (p == 2.0) return std::sqrt(g.cell_volume() * simd::dot(mag, mag));
  double s = 0.0;
  for (double m : mag) s += std::pow(std::fabs(m), p);
  return std::pow(g.cell_volume() * s, 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) { return lp_from_magnitudes(f.grid(), f.values(), p); }

double lp_norm(const VectorField& F, double p) {
  const TorusGrid& g = F.grid();
  std::vector<double> mag(g.size(), 0.0);
  for (int c = 0; c < F.components(); ++c) simd::mul_add(F.component(c), F.component(c), mag);
  for (auto& m : mag) m = std::sqrt(m);
  return lp_from_magnitudes(g, mag, p);
}

double l1_distance(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "l1_distance");
  return f.grid().cell_volume() * simd::sum_abs_diff(f.values(), g.values());
}

double h_neg_s_norm(const ScalarField& f, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("h_neg_s_norm: s must be positive");
  const TorusGrid& g = f.grid();
  const auto f_hat = spectrum(g, f.values());
  const double inv_n = 1.0 / static_cast<double>(g.size());
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  double acc = 0.0;
  const auto k2 = g.k_norm_sq();
  for (std::size_t k = 0; k < g.size(); ++k) {
    acc += std::pow(1.0 + four_pi2 * k2[k], -s) * std::norm(f_hat[k] * inv_n);
  }
  return std::sqrt(acc);
}

double dirichlet_energy(const ScalarField& f) {
  const VectorField grad = gradient(f);
  double acc = 0.0;
  for (int c = 0; c < grad.components(); ++c) acc += simd::dot(grad.component(c), grad.component(c));
  return f.grid().cell_volume() * acc;
}

}  // namespace dk
