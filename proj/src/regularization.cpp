#include "dk/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dk/simd/kernels.hpp"

namespace dk::reg {

void RegParams::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("regularization: eta must lie in (0, 1)");
  if (c1 != 1.0) throw std::invalid_argument("regularization: shipped sigma family has c1 = 1");
  if (!(floor > 0.0)) throw std::invalid_argument("regularization: floor must be positive");
}

double sigma_half(double eta, double zeta) {
  if (!(zeta > 0.0)) return 0.0;
  // sqrt(z + eta^2) - eta without cancellation
  const double s = zeta / (std::sqrt(zeta + eta * eta) + eta);
  return std::tanh(eta * s) / eta;
}

double sigma_half_prime(double eta, double zeta) {
  if (zeta < 0.0) return 0.0;
  const double root = std::sqrt(zeta + eta * eta);
  const double s = zeta / (root + eta);
  const double c = std::cosh(eta * s);
  return 1.0 / (c * c) / (2.0 * root);
}

double psi_entropy(double zeta, double floor) {
  if (!(zeta > 0.0)) return 0.0;
  return zeta * std::log(std::max(zeta, floor)) - zeta;
}

double zeta_trunc(double M, double xi) {
  const double a = std::fabs(xi);
  if (a <= 1.0 / M) return 0.0;
  if (a <= 2.0 / M) return M * (a - 1.0 / M);
  if (a <= M) return 1.0;
  if (a <= M + 1.0) return M + 1.0 - a;
  return 0.0;
}

double standard_bump(double r2) {
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2));
}

namespace {

double log_clip(double M, double z) {
  if (!(z > 0.0)) return -M;
  return std::clamp(std::log(z), -M, M);
}

// Composite Simpson on [-1, 1] against the bump; enough nodes to resolve the
// kinks of the clipped log at the scales used here.
constexpr int kSimpsonIntervals = 2048;

double bump_mass() {
  static const double mass = [] {
    const double step = 2.0 / kSimpsonIntervals;
    double acc = 0.0;
    for (int i = 0; i <= kSimpsonIntervals; ++i) {
      const double y = -1.0 + i * step;
      const double w = (i == 0 || i == kSimpsonIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * standard_bump(y * y);
    }
    return acc * step / 3.0;
  }();
  return mass;
}

}  // namespace

double log_trunc(double M, double eps, double xi) {
  if (!(M > 0.0)) throw std::invalid_argument("log_trunc: M must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("log_trunc: eps must lie in (0, 1)");
  const double step = 2.0 / kSimpsonIntervals;
  double acc = 0.0;
  for (int i = 0; i <= kSimpsonIntervals; ++i) {
    const double y = -1.0 + i * step;
    const double w = (i == 0 || i == kSimpsonIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * standard_bump(y * y) * log_clip(M, xi - eps * y);
  }
  return acc * step / 3.0 / bump_mass();
}

double psi_delta(double delta, double zeta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("psi_delta: delta must lie in (0, 1]");
  const double s = std::clamp((zeta - 0.5 * delta) / (0.5 * delta), 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

double h_delta(double delta, double zeta) { return psi_delta(delta, zeta) * zeta; }

double theta_window_mass(const Trajectory& traj, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("theta_window_mass: need lo < hi");
  return integrate_snapshots(traj, [&](const ScalarField& rho) {
    const VectorField grad = gradient(rho);
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (rho[i] > lo && rho[i] < hi) {
        double g2 = 0.0;
        for (int c = 0; c < grad.components(); ++c) g2 += grad.component(c)[i] * grad.component(c)[i];
        acc += g2;
      }
    }
    return rho.grid().cell_volume() * acc;
  });
}

double path_metric_D(const Trajectory& u, const Trajectory& v, int k_max) {
  if (k_max < 1) throw std::invalid_argument("path_metric_D: k_max must be >= 1");
  if (u.size() != v.size() || u.size() == 0) throw std::invalid_argument("path_metric_D: time mesh mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.times[i] != v.times[i]) throw std::invalid_argument("path_metric_D: time mesh mismatch");
    require_same_grid(u.snapshots[i].grid(), v.snapshots[i].grid(), "path_metric_D");
  }
  double total = 0.0;
  const std::size_t nodes = u.snapshots[0].size();
  std::vector<double> hu(nodes), hv(nodes);
  for (int k = 1; k <= k_max; ++k) {
    const double delta = 1.0 / k;
    std::vector<double> dist(u.size());
    for (std::size_t s = 0; s < u.size(); ++s) {
      for (std::size_t i = 0; i < nodes; ++i) {
        hu[i] = h_delta(delta, u.snapshots[s][i]);
        hv[i] = h_delta(delta, v.snapshots[s][i]);
      }
      dist[s] = u.snapshots[s].grid().cell_volume() * simd::sum_abs_diff(hu, hv);
    }
    double r = 0.0;
    for (std::size_t s = 1; s < u.size(); ++s) r += 0.5 * (u.times[s] - u.times[s - 1]) * (dist[s] + dist[s - 1]);
    total += std::ldexp(1.0, -k) * r / (1.0 + r);
  }
  return total;
}

}  // namespace dk::reg
