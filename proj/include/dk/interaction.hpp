#pragma once
// Interaction kernels V, their integrability exponents, mollification, and
// the empirical check of the space-time integrability assumptions.

#include <limits>
#include <string>
#include <vector>

#include "dk/grid.hpp"

namespace dk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// (A1): d/p + 2/p* <= 1, 2 <= p* < inf, d < p <= inf.
// (A2): d/(2q) + 1/q* <= 1, 1 <= q* < inf, d/2 < q <= inf.
struct LpsExponents {
  double p = kInf;
  double p_star = 2.0;
  double q = kInf;
  double q_star = 1.0;

  bool a1_holds(int d) const;
  bool a2_holds(int d) const;
};

// One real Fourier term a cos(2 pi k.x) + b sin(2 pi k.x) in one component.
struct FourierTerm {
  std::vector<int> k;
  int component = 0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

enum class KernelKind { zero, smooth, power };

// Everything needed to rebuild a kernel on another lattice.
struct KernelSpec {
  KernelKind kind = KernelKind::zero;
  double alpha = 0.5;
  int sign = 1;
  double gamma = 0.0;  // 0 = not mollified
  std::vector<FourierTerm> terms;
};

struct Kernel {
  VectorField field;
  LpsExponents exponents;
  std::string label;
  KernelSpec spec;
};

Kernel kernel_zero(GridPtr grid);
// Band-limited field; every |k_i| must be < n/2. Exponents (inf, 2, inf, 1).
Kernel kernel_smooth_fourier(GridPtr grid, std::vector<FourierTerm> terms);
// d = 2 only: V(x) = sign * x / |x|^(1 + alpha) with x the minimal periodic
// displacement and V(0) = 0. Exponents sit 5% inside the integrability
// thresholds d/alpha and d/(1 + alpha).
Kernel kernel_power_law(GridPtr grid, double alpha, int sign);
inline constexpr double kPowerLawMargin = 0.05;

// Normalized lattice bump of width gamma: h^d sum kappa = 1.
ScalarField mollifier(GridPtr grid, double gamma);
// V^gamma = kappa_gamma * V. Requires 0 < gamma < 1.
Kernel mollify_kernel(const Kernel& V, double gamma);

Kernel build_kernel(const KernelSpec& spec, GridPtr grid);

// Lp norm of the divergence of V computed spectrally.
ScalarField kernel_divergence(const Kernel& V);

struct MollifierBounds {
  double lp_before = 0.0;      // ||V||_{L^p}, p from the kernel exponents (capped at inf)
  double lp_after = 0.0;       // ||V^gamma||_{L^p}
  double sup_after = 0.0;      // ||V^gamma||_inf
  double sup_bound = 0.0;      // ||kappa_gamma||_inf * ||V||_{L^1}
  double bump_sup_scaled = 0.0;  // gamma^d * ||kappa_gamma||_inf (the c in c gamma^-d)
};
MollifierBounds mollifier_bounds(const Kernel& V, double gamma);

struct AssumptionReport {
  int n_coarse = 0;
  int n_fine = 0;
  double lp_coarse = 0.0;   // ||V||_{L^p}
  double lp_fine = 0.0;
  double lq_coarse = 0.0;   // ||div V||_{L^q}
  double lq_fine = 0.0;
  // Refinement trend: ratio of int |V|^p (resp. |div V|^q) under grid
  // doubling; for p = inf the ratio of sup norms.
  double growth_p = 1.0;
  double growth_q = 1.0;
  double div_mass = 0.0;  // h^d sum div V, should vanish
  bool a1_exponents = false;
  bool a2_exponents = false;
  bool trend_bounded = false;
  bool pass = false;
};
inline constexpr double kTrendGrowthLimit = 1.5;

// Evaluates V on its own lattice and on the doubled lattice.
AssumptionReport check_lps(const Kernel& V);

}  // namespace dk
