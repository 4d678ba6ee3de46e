#pragma once
// Rate-function layer: the forward rate 1/2 ||g||^2, the particle-system rate
// obtained from the weighted Riesz representation of the skeleton residual,
// the weak-continuity experiment and Monte Carlo tail estimation.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dk/interaction.hpp"
#include "dk/solver.hpp"

namespace dk {

double rate_forward(const ControlPath& g, double dt);

class RieszError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RieszOptions {
  double floor = 1e-8;
  double rel_tol = 1e-8;
  int max_iter = 5000;
};

struct RieszSolution {
  ScalarField psi;  // zero mean
  double rel_residual = 0.0;
  int iterations = 0;
};

// Solves div(max(rho, floor) grad psi) = -residual with zero-mean psi by
// preconditioned conjugate gradients. The residual must have zero mass.
RieszSolution riesz_solve(const ScalarField& rho, const ScalarField& residual, const RieszOptions& opt = {});
inline ScalarField riesz_potential(const ScalarField& rho, const ScalarField& residual, double floor = 1e-8) {
  RieszOptions opt;
  opt.floor = floor;
  return riesz_solve(rho, residual, opt).psi;
}

// -div(max(rho, floor) grad psi), the operator riesz_solve inverts.
ScalarField weighted_operator(const ScalarField& rho, const ScalarField& psi, double floor);

struct RateOptions {
  double floor = 1e-8;
  // The interaction flux in the residual uses sigma^eta(rho) when eta > 0 so
  // it matches the regularized stepper; eta = 0 uses rho itself.
  double eta = 0.0;
  bool keep_potentials = false;
  RieszOptions riesz{};
};

struct RateResult {
  double I_forward = 0.0;  // filled by callers that know the control
  double I_par = 0.0;
  std::vector<ScalarField> potential;  // per slice, only with keep_potentials
  std::vector<double> residual_norm;   // relative linear-solve residual per slice
  double floor = 0.0;
};

// Slice n uses r = (rho_{n+1} - rho_n)/dt - lap rho_{n+1} + div(rho_n V*rho_n)
// and weight rho_n. Requires stride-1 snapshots.
RateResult rate_par(const Trajectory& traj, const Kernel& V, const RateOptions& opt = {});

struct WeakConvergenceRow {
  int m = 0;
  double distance = 0.0;  // ||rho_m - rho||_{L1([0,T]; L1)}
};

// Skeleton runs with g_m = g + A sin(2 pi m t) e, e the first unit vector.
std::vector<WeakConvergenceRow> weak_convergence_experiment(const ScalarField& rho0, const Kernel& V,
                                                            const ControlPath& g, double A,
                                                            const std::vector<int>& m_list,
                                                            const SolverConfig& cfg);

struct TailEstimate {
  double eps = 0.0;
  int K = 0;
  std::size_t trials = 0;
  std::size_t hits = 0;
  bool censored = false;  // hits = 0: estimate is undefined
  double estimate = 0.0;  // eps log(hits / trials)
  double stderr_ = 0.0;   // delta-method standard error of the estimate
};

using TrajectoryEvent = std::function<bool(const Trajectory&)>;

struct McOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 1000;
  double beta = 0.2;
  unsigned threads = 1;  // affects speed only
};

// Per eps: K = scaling_K(eps, beta, d), `trials` paths of solve_spde with
// stream ids (eps index << 32) | trial.
std::vector<TailEstimate> mc_tail(const ScalarField& rho0, const Kernel& V, const TrajectoryEvent& event,
                                  const std::vector<double>& eps_list, const SolverConfig& base,
                                  const McOptions& opt);

// Final-time L1 tube exit around a reference density.
TrajectoryEvent tube_exit_event(ScalarField reference, double radius);

// Runs f(i) for i in [0, count) on `threads` workers; f must be pure in i.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f);

}  // namespace dk
