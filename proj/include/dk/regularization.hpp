#pragma once
// Scalar regularization and truncation devices: the smoothed square root
// sigma^{1/2,eta} and sigma^eta, the entropy density Psi, the cutoffs zeta^M
// and log^{M,eps}, the kinetic band windows, h_delta / psi_delta and the path
// metric D.

#include "dk/trajectory.hpp"

namespace dk::reg {

struct RegParams {
  double eta = 0.01;
  double c1 = 1.0;
  double floor = 1e-12;

  void validate() const;  // throws std::invalid_argument
};

// sigma^{1/2,eta}(z) = tanh(eta * s) / eta with s = sqrt(z + eta^2) - eta,
// extended by 0 for z < 0. Satisfies 0 <= sigma <= sqrt(z), sigma <= 1/eta,
// 0 <= sigma' <= min(1/(2 eta), 1/(2 sqrt z)).
double sigma_half(double eta, double zeta);
double sigma_half_prime(double eta, double zeta);
inline double sigma(double eta, double zeta) {
  const double s = sigma_half(eta, zeta);
  return s * s;
}

// Psi(z) = z log z - z, with log floored at `floor`; Psi(z) = 0 for z <= 0.
double psi_entropy(double zeta, double floor = 1e-12);

// Piecewise-linear cutoff vanishing near 0 and beyond M + 1.
double zeta_trunc(double M, double xi);

// log clipped to [-M, M] (-M for xi <= 0) and mollified over width eps.
double log_trunc(double M, double eps, double xi);

// Smooth compact bump exp(-1 / (1 - r^2)) for r^2 < 1, else 0 (unnormalized).
double standard_bump(double r2);

// psi_delta: 0 on [0, delta/2], 1 on [delta, inf), smoothstep bridge;
// |psi_delta'| <= 3 / delta.
double psi_delta(double delta, double zeta);
inline constexpr double kPsiDeltaSlope = 3.0;
double h_delta(double delta, double zeta);

// int_0^T h^d sum 1{lo < rho < hi} |grad rho|^2 dt over the stored snapshots.
double theta_window_mass(const Trajectory& traj, double lo, double hi);

// sum_{k <= k_max} 2^-k r_k / (1 + r_k), r_k the L1([0,T];L1) distance of
// h_{1/k}(u) and h_{1/k}(v). Truncation error is at most 2^-k_max.
double path_metric_D(const Trajectory& u, const Trajectory& v, int k_max = 20);

}  // namespace dk::reg
