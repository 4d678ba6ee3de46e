#pragma once
// Checks of the a-priori estimates on computed trajectories. Every check
// records the measured value, the bound it is compared against and the slack
// used; constants that the estimates leave symbolic are either derived
// explicitly (smooth kernels) or calibrated once on a reference density.

#include <iosfwd>
#include <string>
#include <vector>

#include "dk/interaction.hpp"
#include "dk/trajectory.hpp"

namespace dk {

struct CheckResult {
  std::string name;
  std::string estimate;  // which structural estimate the check exercises
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  double slack = 0.0;
  std::string note;
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  const CheckResult& find(const std::string& name) const;
  void append(const DiagnosticsReport& other);
  // CSV columns: check,measured,bound,pass
  void write_csv(std::ostream& os) const;
  void write_text(std::ostream& os) const;
};

// max_t |mass(t) - mass(0)| over step records and snapshots; passes when the
// drift is at most rel_tol * mass(0) * max(1, steps / 1000).
DiagnosticsReport conservation_report(const Trajectory& traj, double rel_tol = 1e-10);

struct EntropyOptions {
  double c_gn = 1.0;     // interpolation constant; exactly 1 for p = inf
  double slack = 0.05;
  double rhs_scale = 1.0;  // < 1 turns the check into a negative control
};

// Per unit time kernel constant C_V such that
//   B D^theta <= 2 D + C_V,  B = 2 c_gn ||V||_p m^(3/2 - d/(2p)),  theta = (p+d)/(2p).
double entropy_kernel_constant(const Kernel& V, double mass, double c_gn = 1.0);

// For every stored step t:
//   int Psi(rho(t)) + sum_{s<=t} ||grad sqrt rho||^2 dt
//     <= int Psi(rho0) + ||g||^2 + t C_V.
// Both sides are shifted by the torus volume (Psi >= -1) before the relative
// slack is applied, so they are nonnegative.
DiagnosticsReport entropy_report(const Trajectory& traj, double control_energy, const Kernel& V,
                                 const EntropyOptions& opt = {});

// Pure-diffusion form: int Psi(rho(t)) + 4 sum ||grad sqrt rho||^2 dt must be
// non-increasing up to tol.
DiagnosticsReport entropy_monotonicity(const Trajectory& traj, double tol);

double max_l1_distance(const Trajectory& a, const Trajectory& b);
// Gamma = max_t ||a(t) - b(t)||_1 / ||a(0) - b(0)||_1. Throws on zero initial distance.
double l1_gamma(const Trajectory& a, const Trajectory& b);

struct L1StabilityOptions {
  bool heat_case = false;        // V = 0, g = 0: also require Gamma <= 1 + 1e-6
  double refined_gamma = 0.0;    // Gamma from the dt/2 pair; 0 skips the refinement check
  double refinement_tol = 0.10;
};
DiagnosticsReport l1_stability(const Trajectory& a, const Trajectory& b, const L1StabilityOptions& opt = {});

struct KineticBand {
  double M = 0.0;
  double high_mass = 0.0;   // band (M, M + 1)
  double low_scaled = 0.0;  // M * band (1/M, 2/M)
};
struct KineticBandReport {
  std::vector<KineticBand> bands;
};
KineticBandReport kinetic_band_report(const Trajectory& traj, const std::vector<double>& M_list);

// c such that the interpolation bound is tight on (1 + sin(2 pi x_1)/2)^2.
double calibrate_gn(const Kernel& V, double p);
// ||sqrt h (V*h)||_2 <= c ||grad sqrt h||^(d/p) ||V||_p ||h||_1^(3/2 - d/(2p)), checked
// against 1.1 c. Constant h routes to a skipped check.
DiagnosticsReport gn_check(const ScalarField& h, const Kernel& V, double p, double c_gn);

// int_0^T ||rho||_r^r dt over the step records' snapshots.
double lr_time_integral(const Trajectory& traj, double r);

// Largest L1 change between consecutive snapshots.
double max_snapshot_increment(const Trajectory& traj);

}  // namespace dk
