#pragma once
// Uniform periodic lattice on the unit torus, fields sampled on it, and the
// spectral operators the rest of the library is written against.
//
// Transform convention: forward() is the unnormalized DFT
//   F_k = sum_j f_j exp(-2 pi i k.x_j),
// inverse() divides by the node count. The Fourier coefficient of the
// continuum function is therefore F_k / N (so that sum_k |F_k / N|^2 equals
// the quadrature L2 norm squared); h_neg_s_norm() uses that normalization.
//
// Wavevectors per axis run over {-n/2, ..., n/2 - 1}. Derivative symbols are
// 2 pi k with the Nyquist entry k = -n/2 set to zero, and the Laplacian symbol
// is built from the same truncated symbols so that div(grad f) == lap(f).

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dk/simd/kernels.hpp"

namespace dk {

using cplx = std::complex<double>;

class TorusGrid;
using GridPtr = std::shared_ptr<const TorusGrid>;

class TorusGrid {
 public:
  // d in {1,2,3}; n even and >= 8. Throws std::invalid_argument otherwise.
  static GridPtr make(int d, int n);

  ~TorusGrid();
  TorusGrid(const TorusGrid&) = delete;
  TorusGrid& operator=(const TorusGrid&) = delete;

  int dim() const { return d_; }
  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }

  // Integer wavevector of spectral slot idx (d entries).
  std::span<const int> wavevector(std::size_t idx) const {
    return {modes_.data() + idx * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  // Lattice index of node idx along axis (row-major, last axis fastest).
  int node_index(std::size_t idx, int axis) const;
  double coordinate(std::size_t idx, int axis) const { return h_ * node_index(idx, axis); }

  std::span<const double> deriv_symbol(int axis) const { return deriv_[static_cast<std::size_t>(axis)]; }
  // -sum_i (2 pi k_i)^2 with the Nyquist entries dropped.
  std::span<const double> laplacian_symbol() const { return laplacian_; }
  // |k|^2 over the full integer wavevector (Nyquist kept).
  std::span<const double> k_norm_sq() const { return knorm2_; }

  void forward(std::span<const double> in, std::span<cplx> out) const;
  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  // Real part of the normalized inverse transform.
  void inverse(std::span<const cplx> in, std::span<double> out) const;
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

  bool same_shape(const TorusGrid& other) const { return d_ == other.d_ && n_ == other.n_; }

 private:
  TorusGrid(int d, int n);

  struct Plans;
  int d_;
  int n_;
  double h_;
  std::size_t size_;
  double cell_volume_;
  std::vector<int> modes_;
  std::vector<std::vector<double>> deriv_;
  std::vector<double> laplacian_;
  std::vector<double> knorm2_;
  std::unique_ptr<Plans> plans_;
};

class ScalarField {
 public:
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  const TorusGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double mass() const;
  double min() const;
  double max() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

// d components stored component-major.
class VectorField {
 public:
  explicit VectorField(GridPtr grid);

  const TorusGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int components() const { return grid_->dim(); }
  std::size_t nodes() const { return grid_->size(); }

  std::span<double> component(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * nodes(), nodes()};
  }
  std::span<const double> component(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * nodes(), nodes()};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

 private:
  GridPtr grid_;
  std::vector<double> data_;
};

// Throws std::invalid_argument when the fields live on different lattices.
void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what);

// (V*rho)(x_i) = h^d sum_j V(x_i - x_j) rho(x_j), componentwise, via FFT.
VectorField periodic_convolve(const VectorField& V, const ScalarField& rho);
ScalarField periodic_convolve(const ScalarField& a, const ScalarField& b);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& F);
ScalarField laplacian(const ScalarField& f);
// grad sqrt(max(rho, floor)).
VectorField grad_sqrt(const ScalarField& rho, double floor = 1e-12);

// Quadrature norms; p = infinity gives the max norm. For vector fields the
// pointwise Euclidean magnitude is used.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& F, double p);
double l1_distance(const ScalarField& f, const ScalarField& g);
// (sum_k (1 + 4 pi^2 |k|^2)^(-s) |c_k|^2)^(1/2), c_k = F_k / N.
double h_neg_s_norm(const ScalarField& f, double s);
// sum of |grad f|^2 quadrature, i.e. ||grad f||_{L2}^2.
double dirichlet_energy(const ScalarField& f);

}  // namespace dk
