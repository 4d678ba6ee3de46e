#include "dk/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dk/regularization.hpp"

namespace dk {

bool LpsExponents::a1_holds(int d) const {
  if (!(p > d)) return false;
  if (!(p_star >= 2.0 && std::isfinite(p_star))) return false;
  return d / p + 2.0 / p_star <= 1.0 + 1e-12;
}

bool LpsExponents::a2_holds(int d) const {
  if (!(q > 0.5 * d)) return false;
  if (!(q_star >= 1.0 && std::isfinite(q_star))) return false;
  return d / (2.0 * q) + 1.0 / q_star <= 1.0 + 1e-12;
}

namespace {

// Minimal signed periodic displacement of lattice index j, in [-1/2, 1/2).
double periodic_offset(int j, int n) {
  const int s = j < n / 2 ? j : j - n;
  return static_cast<double>(s) / n;
}

std::string format_label(const KernelSpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case KernelKind::zero: os << "zero"; break;
    case KernelKind::smooth: os << "smooth(" << spec.terms.size() << " terms)"; break;
    case KernelKind::power: os << "power(alpha=" << spec.alpha << ",sign=" << spec.sign << ")"; break;
  }
  if (spec.gamma > 0.0) os << "*bump(" << spec.gamma << ")";
  return os.str();
}

}  // namespace

Kernel kernel_zero(GridPtr grid) {
  KernelSpec spec;
  spec.kind = KernelKind::zero;
  VectorField field(grid);
  return Kernel{std::move(field), LpsExponents{kInf, 2.0, kInf, 1.0}, "zero", spec};
}

Kernel kernel_smooth_fourier(GridPtr grid, std::vector<FourierTerm> terms) {
  const int d = grid->dim();
  const int n = grid->n();
  VectorField field(grid);
  for (const auto& term : terms) {
    if (static_cast<int>(term.k.size()) != d) throw std::invalid_argument("kernel_smooth_fourier: wavevector dimension mismatch");
    if (term.component < 0 || term.component >= d) throw std::invalid_argument("kernel_smooth_fourier: component out of range");
    for (int ki : term.k) {
      if (std::abs(ki) >= n / 2) throw std::invalid_argument("kernel_smooth_fourier: mode outside the grid band");
    }
    auto comp = field.component(term.component);
    for (std::size_t idx = 0; idx < grid->size(); ++idx) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += term.k[static_cast<std::size_t>(a)] * grid->coordinate(idx, a);
      phase *= 2.0 * std::numbers::pi;
      comp[idx] += term.cos_coeff * std::cos(phase) + term.sin_coeff * std::sin(phase);
    }
  }
  KernelSpec spec;
  spec.kind = KernelKind::smooth;
  spec.terms = std::move(terms);
  std::string label = format_label(spec);
  return Kernel{std::move(field), LpsExponents{kInf, 2.0, kInf, 1.0}, std::move(label), std::move(spec)};
}

Kernel kernel_power_law(GridPtr grid, double alpha, int sign) {
  if (grid->dim() != 2) throw std::invalid_argument("kernel_power_law: only d = 2 is supported");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("kernel_power_law: alpha must lie in (0, 1)");
  if (sign != 1 && sign != -1) throw std::invalid_argument("kernel_power_law: sign must be +1 or -1");
  const int d = grid->dim();
  const int n = grid->n();
  VectorField field(grid);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < grid->size(); ++idx) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      x[static_cast<std::size_t>(a)] = periodic_offset(grid->node_index(idx, a), n);
      r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    }
    if (r2 == 0.0) continue;  // V(0) = 0
    const double scale = sign * std::pow(r2, -0.5 * (1.0 + alpha));
    for (int a = 0; a < d; ++a) field.component(a)[idx] = scale * x[static_cast<std::size_t>(a)];
  }
  LpsExponents e;
  e.p = (d / alpha) * (1.0 - kPowerLawMargin);
  e.q = std::max(1.0, (d / (1.0 + alpha)) * (1.0 - kPowerLawMargin));
  // Smallest admissible time exponents, shared between (A1) and (A2).
  const double p_star = e.p > d ? std::max(2.0, 2.0 / (1.0 - d / e.p)) : kInf;
  const double q_star = e.q > 0.5 * d ? std::max(1.0, 1.0 / (1.0 - d / (2.0 * e.q))) : kInf;
  e.p_star = e.q_star = std::max(p_star, q_star);
  KernelSpec spec;
  spec.kind = KernelKind::power;
  spec.alpha = alpha;
  spec.sign = sign;
  return Kernel{std::move(field), e, format_label(spec), spec};
}

ScalarField mollifier(GridPtr grid, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("mollify_kernel: gamma must lie in (0, 1)");
  const int d = grid->dim();
  const int n = grid->n();
  ScalarField kappa(grid);
  for (std::size_t idx = 0; idx < grid->size(); ++idx) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double xa = periodic_offset(grid->node_index(idx, a), n);
      r2 += xa * xa;
    }
    kappa[idx] = reg::standard_bump(r2 / (gamma * gamma));
  }
  const double mass = kappa.mass();
  simd::scale(1.0 / mass, kappa.values());
  return kappa;
}

Kernel mollify_kernel(const Kernel& V, double gamma) {
  const ScalarField kappa = mollifier(V.field.grid_ptr(), gamma);
  Kernel out{periodic_convolve(V.field, kappa), V.exponents, {}, V.spec};
  out.spec.gamma = gamma;
  out.label = format_label(out.spec);
  return out;
}

Kernel build_kernel(const KernelSpec& spec, GridPtr grid) {
  Kernel k = [&] {
    switch (spec.kind) {
      case KernelKind::smooth: return kernel_smooth_fourier(grid, spec.terms);
      case KernelKind::power: return kernel_power_law(grid, spec.alpha, spec.sign);
      case KernelKind::zero: break;
    }
    return kernel_zero(grid);
  }();
  if (spec.gamma > 0.0) k = mollify_kernel(k, spec.gamma);
  return k;
}

ScalarField kernel_divergence(const Kernel& V) { return divergence(V.field); }

MollifierBounds mollifier_bounds(const Kernel& V, double gamma) {
  const ScalarField kappa = mollifier(V.field.grid_ptr(), gamma);
  const Kernel Vg = mollify_kernel(V, gamma);
  const double p = V.exponents.p;
  MollifierBounds b;
  b.lp_before = lp_norm(V.field, p);
  b.lp_after = lp_norm(Vg.field, p);
  b.sup_after = lp_norm(Vg.field, kInf);
  const double kappa_sup = kappa.max();
  b.sup_bound = kappa_sup * lp_norm(V.field, 1.0);
  b.bump_sup_scaled = kappa_sup * std::pow(gamma, V.field.grid().dim());
  return b;
}

namespace {

// int |f|^p for finite p, sup |f| otherwise.
double power_integral(double norm, double p) { return std::isinf(p) ? norm : std::pow(norm, p); }

double growth(double coarse, double fine) {
  if (coarse == 0.0 && fine == 0.0) return 1.0;
  if (coarse == 0.0) return kInf;
  return fine / coarse;
}

}  // namespace

AssumptionReport check_lps(const Kernel& V) {
  const GridPtr& coarse = V.field.grid_ptr();
  const int d = coarse->dim();
  AssumptionReport r;
  r.n_coarse = coarse->n();
  r.n_fine = 2 * coarse->n();
  const GridPtr fine = TorusGrid::make(d, r.n_fine);
  const Kernel Vf = build_kernel(V.spec, fine);

  const double p = V.exponents.p;
  const double q = V.exponents.q;
  const ScalarField div_c = kernel_divergence(V);
  const ScalarField div_f = kernel_divergence(Vf);

  r.lp_coarse = lp_norm(V.field, p);
  r.lp_fine = lp_norm(Vf.field, p);
  r.lq_coarse = lp_norm(div_c, q);
  r.lq_fine = lp_norm(div_f, q);
  r.growth_p = growth(power_integral(r.lp_coarse, p), power_integral(r.lp_fine, p));
  r.growth_q = growth(power_integral(r.lq_coarse, q), power_integral(r.lq_fine, q));
  r.div_mass = div_c.mass();
  r.a1_exponents = V.exponents.a1_holds(d);
  r.a2_exponents = V.exponents.a2_holds(d);
  r.trend_bounded = r.growth_p < kTrendGrowthLimit && r.growth_q < kTrendGrowthLimit;
  r.pass = r.a1_exponents && r.a2_exponents && r.trend_bounded;
  return r;
}

}  // namespace dk
