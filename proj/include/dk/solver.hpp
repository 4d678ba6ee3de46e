#pragma once
// One semi-implicit stepper for the regularized skeleton equation, the
// Ito-form Dean-Kawasaki SPDE and the stochastic controlled equation:
//
//   rho' = rho + dt lap rho'
//          - dt div( sigma^eta(rho) V^gamma * rho )
//          - dt div( sigma^{1/2,eta}(rho) P_K g )
//          + dt (eps N_K / 2) div( |sigma^{1/2,eta}'(rho)|^2 grad rho )
//          - sqrt(eps) div( sigma^{1/2,eta}(rho) dxi^K )
//
// Diffusion is implicit in Fourier space; everything else is explicit and
// assembled as one flux whose divergence is taken spectrally, so the k = 0
// coefficient (the mass) never changes.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dk/grid.hpp"
#include "dk/interaction.hpp"
#include "dk/noise.hpp"
#include "dk/trajectory.hpp"

namespace dk {

// Control g sampled once per time step (left endpoint of each step).
struct ControlPath {
  std::vector<VectorField> g;
  std::optional<double> bound;  // energy cap N of the admissible class

  // int_0^T ||g||_{L2}^2 dt, rectangle rule on the step grid.
  double energy(double dt) const;
  std::size_t steps() const { return g.size(); }

  static ControlPath zero(GridPtr grid, std::size_t steps);
  static ControlPath from_function(GridPtr grid, std::size_t steps, double dt,
                                   const std::function<void(double t, VectorField& out)>& f);
};

// Effective control g = sqrt(max(rho, 0)) grad phi, evaluated on the current state.
struct DriftGradient {
  ScalarField phi;
};

using Control = std::variant<std::monostate, ControlPath, DriftGradient>;

enum class Positivity { observe_only, clamp_report };

struct SolverConfig {
  double T = 0.1;
  double dt = 1e-4;
  double eta = 0.01;
  double gamma = 0.0;  // kernel mollification width, 0 = use V as given
  double eps = 0.0;
  std::optional<NoiseSpec> noise;
  int snapshot_stride = 1;
  Positivity positivity = Positivity::observe_only;
  double floor = 1e-12;
  bool record_dissipation = true;  // entropy / dissipation / l2 records
  bool record_control = false;     // keep the realized (unprojected) g path

  std::size_t steps() const;  // T / dt, validated to be an integer
  void validate() const;      // throws std::invalid_argument naming the field
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t step) : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct SolveResult {
  Trajectory traj;
  double control_energy = 0.0;  // int ||g||^2 dt of the realized control
  std::optional<ControlPath> realized_control;
  std::size_t clamp_events = 0;
  double clamped_mass = 0.0;
  std::vector<std::string> warnings;
};

class Stepper {
 public:
  // The kernel is mollified here when cfg.gamma > 0. Power-law kernels
  // require gamma > 0.
  Stepper(GridPtr grid, const SolverConfig& cfg, const Kernel& V);

  // One step from rho. g_t may be null (no control); dxi may be null (no
  // noise). The control is projected onto |k| <= K whenever cfg.noise is set.
  ScalarField step(const ScalarField& rho, const VectorField* g_t, const VectorField* dxi) const;

  const Kernel& effective_kernel() const { return kernel_; }
  double ito_coefficient() const { return ito_coeff_; }

 private:
  GridPtr grid_;
  SolverConfig cfg_;
  Kernel kernel_;
  bool kernel_active_ = false;
  std::vector<std::vector<cplx>> kernel_hat_;
  std::vector<double> implicit_inv_;   // 1 / (1 - dt lap_k)
  std::vector<double> projection_;     // P_K mask, empty when no projection
  double ito_coeff_ = 0.0;             // eps N_K / 2
};

// Free-standing single step.
ScalarField step(const ScalarField& rho, const SolverConfig& cfg, const Kernel& V, const VectorField* g_t,
                 const VectorField* dxi);

// Requires cfg.eps == 0 and no noise.
SolveResult solve_skeleton(const ScalarField& rho0, const Control& g, const Kernel& V, const SolverConfig& cfg);
// Requires cfg.noise; eps in [0, 1) (eps = 0 reproduces the skeleton with g = 0).
SolveResult solve_spde(const ScalarField& rho0, const Kernel& V, const SolverConfig& cfg);
// Requires a control; eps in [0, 1); P_K applied when cfg.noise is set.
SolveResult solve_controlled(const ScalarField& rho0, const Kernel& V, const Control& g, const SolverConfig& cfg);

// Integral of Psi(rho) with the configured floor.
double entropy_integral(const ScalarField& rho, double floor = 1e-12);

}  // namespace dk
