#pragma once
// Ultraviolet-cutoff spectral noise
//   d xi^K(x) = sum_{|k| <= K} sin(2 pi k.x) dB^k + cos(2 pi k.x) dW^k,
// with B^k, W^k independent d-dimensional Brownian motions, plus the
// Fourier projection P_K of controls and the joint scaling K(eps).
//
// Gaussian draws are produced by a counter-based generator keyed on
// (seed, stream, step, draw index), so increments do not depend on the order
// in which trajectories or steps are evaluated.

#include <cstdint>
#include <vector>

#include "dk/grid.hpp"

namespace dk {

struct ModeSet {
  int d = 0;
  int K = 0;
  std::vector<std::vector<int>> kvecs;  // all integer k with |k|_2 <= K, k = 0 included
  std::int64_t N_K = 0;                 // number of modes
  std::int64_t M_K = 0;                 // sum of |k|_2^2
};

ModeSet build_modes(int d, int K);

struct NoiseSpec {
  ModeSet modes;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Standard normal draw for a (seed, stream, step, index) key.
double keyed_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t step, std::uint64_t index);

// Caches the sin/cos tables of a mode set on one grid.
class NoiseSampler {
 public:
  NoiseSampler(const ModeSet& modes, GridPtr grid);

  const ModeSet& modes() const { return modes_; }
  // Fills out with Delta xi^K for the given key; each Brownian component has
  // variance dt.
  void sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t step, double dt, VectorField& out) const;

 private:
  ModeSet modes_;
  GridPtr grid_;
  std::vector<std::vector<double>> sin_;
  std::vector<std::vector<double>> cos_;
};

VectorField sample_increment(const NoiseSpec& spec, GridPtr grid, double dt, std::uint64_t step);

// Zeroes every Fourier coefficient with |k|_2 > K, componentwise.
VectorField project_control(const VectorField& g, int K);

struct ScalingChoice {
  int K = 1;
  double eps_K_pow = 0.0;  // eps * K^(d+2)
};
// K = max(1, floor(eps^-beta)); requires 0 < beta < 1/(d+2) and eps in (0, 1].
ScalingChoice scaling_K(double eps, double beta, int d);

}  // namespace dk
