// Acceptance runner. Each criterion prints one line:
//   criterion <i>: PASS|FAIL  <title>  <measurements>
// and the process exits non-zero if any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dk/diagnostics.hpp"
#include "dk/noise.hpp"
#include "dk/rate.hpp"
#include "dk/regularization.hpp"
#include "dk/solver.hpp"
#include "oracles.hpp"

using namespace dk;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTubeRadius = 0.3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SolverConfig solver_cfg(double T, double dt, double eta = 0.01) {
  SolverConfig c;
  c.T = T;
  c.dt = dt;
  c.eta = eta;
  return c;
}

ScalarField cosine_density(GridPtr g, double a, int mode = 1) {
  return oracle::field_from(g, [a, mode](const auto& x) { return 1.0 + a * std::cos(2 * kPi * mode * x[0]); });
}

// Positive random density built from a handful of low Fourier modes.
ScalarField random_density(GridPtr g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.12, 0.12);
  std::vector<std::array<double, 4>> terms;
  for (int i = 0; i < 4; ++i) terms.push_back({u(rng), u(rng), double(i % 2 + 1), double(i / 2)});
  return oracle::field_from(g, [&](const auto& x) {
    double v = 1.0;
    for (const auto& t : terms) {
      const double ph = 2 * kPi * (t[2] * x[0] + t[3] * (x.size() > 1 ? x[1] : 0.0));
      v += t[0] * std::cos(ph) + t[1] * std::sin(ph);
    }
    return v;
  });
}

Kernel random_smooth_kernel(GridPtr g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-2, 2);
  std::vector<FourierTerm> terms;
  for (int i = 0; i < 3; ++i) {
    std::vector<int> kv(static_cast<std::size_t>(g->dim()));
    for (auto& v : kv) v = k(rng);
    terms.push_back({kv, i % g->dim(), u(rng), u(rng)});
  }
  return kernel_smooth_fourier(g, terms);
}

// ---------------------------------------------------------------------------

Outcome heat_exactness() {
  auto g = TorusGrid::make(1, 64);
  const SolverConfig cfg = solver_cfg(0.1, 1e-4);
  const SolveResult r = solve_skeleton(cosine_density(g, 0.5), std::monostate{}, kernel_zero(g), cfg);
  const ScalarField exact = oracle::field_from(g, [](const auto& x) {
    return 1.0 + 0.5 * std::exp(-4 * kPi * kPi * 0.1) * std::cos(2 * kPi * x[0]);
  });
  double err = 0.0, ref = 0.0;
  const ScalarField& got = r.traj.snapshots.back();
  for (std::size_t i = 0; i < got.size(); ++i) {
    err += (got[i] - exact[i]) * (got[i] - exact[i]);
    ref += exact[i] * exact[i];
  }
  const double rel = std::sqrt(err / ref);
  return {rel <= 1e-3, fmt("rel L2 error %.3e (bound 1e-3)", rel)};
}

Outcome mass_conservation() {
  struct Case {
    std::string name;
    std::function<SolveResult()> run;
  };
  std::vector<Case> cases;
  cases.push_back({"skeleton d=2 smooth V", [] {
                     auto g = TorusGrid::make(2, 32);
                     std::mt19937_64 rng(1);
                     const Kernel V = random_smooth_kernel(g, rng);
                     return solve_skeleton(random_density(g, rng), std::monostate{}, V, solver_cfg(0.1, 1e-4));
                   }});
  cases.push_back({"spde d=1 K=4", [] {
                     auto g = TorusGrid::make(1, 64);
                     SolverConfig c = solver_cfg(0.1, 1e-4);
                     c.eps = 1e-3;
                     c.noise = NoiseSpec{build_modes(1, 4), 3, 0};
                     return solve_spde(cosine_density(g, 0.5), kernel_smooth_fourier(g, {{{1}, 0, 0.0, 1.0}}), c);
                   }});
  cases.push_back({"spde d=2 mollified power law", [] {
                     auto g = TorusGrid::make(2, 32);
                     SolverConfig c = solver_cfg(0.05, 5e-5);
                     c.eps = 1e-3;
                     c.gamma = 0.1;
                     c.noise = NoiseSpec{build_modes(2, 2), 4, 0};
                     return solve_spde(cosine_density(g, 0.3), kernel_power_law(g, 0.5, 1), c);
                   }});
  cases.push_back({"controlled drift-gradient d=1", [] {
                     auto g = TorusGrid::make(1, 64);
                     SolverConfig c = solver_cfg(0.1, 1e-4);
                     c.eps = 1e-2;
                     c.noise = NoiseSpec{build_modes(1, 3), 5, 0};
                     const ScalarField phi = oracle::field_from(g, [](const auto& x) { return 0.3 * std::sin(2 * kPi * x[0]); });
                     return solve_controlled(cosine_density(g, 0.4), kernel_zero(g), DriftGradient{phi}, c);
                   }});
  bool pass = true;
  double worst = 0.0;
  std::size_t min_steps = ~std::size_t{0};
  for (const auto& c : cases) {
    const SolveResult r = c.run();
    const DiagnosticsReport rep = conservation_report(r.traj, 1e-10);
    const CheckResult& m = rep.find("mass_drift");
    worst = std::max(worst, m.measured / r.traj.records.front().mass);
    min_steps = std::min(min_steps, r.traj.records.size() - 1);
    pass = pass && m.pass;
  }
  pass = pass && min_steps >= 1000;
  return {pass, fmt("%zu runs, >= %zu steps each, worst relative drift %.2e (bound 1e-10)", cases.size(), min_steps, worst)};
}

Outcome convolution_oracle() {
  double worst = 0.0;
  int cases = 0;
  for (int c = 0; c < 20; ++c) {
    const int d = c < 10 ? 1 : 2;
    const int n = d == 1 ? 16 : 8;
    auto g = TorusGrid::make(d, n);
    const auto a = oracle::random_vector(g->size(), 1000 + c);
    const auto b = oracle::random_vector(g->size(), 2000 + c, 0.0, 3.0);
    const ScalarField fast = periodic_convolve(ScalarField(g, a), ScalarField(g, b));
    const auto ref = oracle::direct_convolve(a, b, d, n);
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::fabs(fast[i] - ref[i]));
    ++cases;
  }
  return {worst <= 1e-12, fmt("%d cases, max abs difference %.2e (bound 1e-12)", cases, worst)};
}

Outcome sigma_suite() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> zs(10000);
  for (auto& z : zs) z = u(rng);
  std::size_t violations = 0;
  std::vector<double> sup_err;
  for (double eta : {0.1, 0.01, 0.001}) {
    for (double z : zs) {
      const double s = reg::sigma_half(eta, z);
      const double ds = reg::sigma_half_prime(eta, z);
      const double root = std::sqrt(z);
      if (s < 0.0 || s > root * (1 + 1e-14)) ++violations;
      if (s > 1.0 / eta) ++violations;
      if (ds < 0.0 || ds > 1.0 / (2 * eta) * (1 + 1e-12)) ++violations;
      if (z > 0.0 && ds > 1.0 / root) ++violations;
    }
    double sup = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double z = 4.0 * i / 10000;
      sup = std::max(sup, std::fabs(reg::sigma_half(eta, z) - std::sqrt(z)));
    }
    sup_err.push_back(sup);
  }
  const bool monotone = sup_err[1] < sup_err[0] && sup_err[2] < sup_err[1];
  const bool pass = violations == 0 && monotone && sup_err[2] < 0.05;
  return {pass, fmt("violations %zu over 3x10^4 samples; sup|sigma-sqrt| on [0,4]: %.3e, %.3e, %.3e (last < 0.05)",
                    violations, sup_err[0], sup_err[1], sup_err[2])};
}

Outcome noise_statistics() {
  auto g = TorusGrid::make(2, 16);
  const ModeSet modes = build_modes(2, 2);
  const NoiseSampler sampler(modes, g);
  const double dt = 1e-3;
  const int draws = 10000;
  const std::size_t x = 5, y = 5 + 3 * 16 + 2;  // offset (3, 2) lattice cells
  double vx[2] = {0, 0}, cxy[2] = {0, 0};
  VectorField inc(g);
  for (int s = 0; s < draws; ++s) {
    sampler.sample(99, 0, static_cast<std::uint64_t>(s), dt, inc);
    for (int c = 0; c < 2; ++c) {
      const double a = inc.component(c)[x], b = inc.component(c)[y];
      vx[c] += a * a;
      cxy[c] += a * b;
    }
  }
  const double var = dt * static_cast<double>(modes.N_K);
  double cov = 0.0;
  const double dx0 = g->coordinate(x, 0) - g->coordinate(y, 0), dx1 = g->coordinate(x, 1) - g->coordinate(y, 1);
  for (const auto& k : modes.kvecs) cov += dt * std::cos(2 * kPi * (k[0] * dx0 + k[1] * dx1));
  const double se_var = var * std::sqrt(2.0 / draws);
  const double se_cov = std::sqrt((var * var + cov * cov) / draws);
  double worst = 0.0;
  for (int c = 0; c < 2; ++c) {
    worst = std::max(worst, std::fabs(vx[c] / draws - var) / se_var);
    worst = std::max(worst, std::fabs(cxy[c] / draws - cov) / se_cov);
  }
  return {worst <= 3.0, fmt("N_K=%lld, variance target %.4g, covariance target %.4g, worst deviation %.2f SE (bound 3)",
                            static_cast<long long>(modes.N_K), var, cov, worst)};
}

Outcome entropy_dissipation() {
  auto g = TorusGrid::make(2, 32);
  std::mt19937_64 rng(31415);
  int passed = 0;
  double worst_ratio = 0.0;
  const SolverConfig cfg = solver_cfg(0.05, 1e-4);
  for (int c = 0; c < 10; ++c) {
    const Kernel V = random_smooth_kernel(g, rng);
    const ScalarField rho0 = random_density(g, rng);
    const SolveResult r = solve_skeleton(rho0, std::monostate{}, V, cfg);
    const DiagnosticsReport rep = entropy_report(r.traj, r.control_energy, V);
    if (rep.all_pass()) ++passed;
    for (const auto& chk : rep.checks) worst_ratio = std::max(worst_ratio, chk.measured / chk.bound);
  }
  const SolveResult heat = solve_skeleton(random_density(g, rng), std::monostate{}, kernel_zero(g), cfg);
  const DiagnosticsReport mono = entropy_monotonicity(heat.traj, 1e-6 * cfg.T);
  const bool pass = passed == 10 && mono.all_pass();
  return {pass, fmt("%d/10 smooth-kernel cases within 5%% slack (max shifted LHS/RHS %.3f); diffusion monotone: %s",
                    passed, worst_ratio, mono.all_pass() ? "yes" : "no")};
}

Outcome l1_stability_criterion() {
  auto g = TorusGrid::make(1, 64);
  const ScalarField a0 = cosine_density(g, 0.5), b0 = cosine_density(g, 0.2, 2);
  const SolverConfig cfg = solver_cfg(0.1, 1e-4);
  const SolveResult ha = solve_skeleton(a0, std::monostate{}, kernel_zero(g), cfg);
  const SolveResult hb = solve_skeleton(b0, std::monostate{}, kernel_zero(g), cfg);
  L1StabilityOptions heat_opt;
  heat_opt.heat_case = true;
  const DiagnosticsReport heat = l1_stability(ha.traj, hb.traj, heat_opt);
  const double gamma_heat = l1_gamma(ha.traj, hb.traj);

  const Kernel V = kernel_smooth_fourier(g, {{{1}, 0, 0.0, -3.0}, {{2}, 0, 1.0, 0.0}});
  const double gamma_fine = l1_gamma(solve_skeleton(a0, std::monostate{}, V, solver_cfg(0.1, 5e-5)).traj,
                                     solve_skeleton(b0, std::monostate{}, V, solver_cfg(0.1, 5e-5)).traj);
  L1StabilityOptions opt;
  opt.refined_gamma = gamma_fine;
  const DiagnosticsReport smooth = l1_stability(solve_skeleton(a0, std::monostate{}, V, cfg).traj,
                                                solve_skeleton(b0, std::monostate{}, V, cfg).traj, opt);
  const double gamma_smooth = smooth.find("l1_gamma_finite").measured;
  const bool pass = heat.all_pass() && smooth.all_pass();
  return {pass, fmt("heat Gamma %.9f (bound 1+1e-6); smooth-V Gamma %.4f, dt/2 Gamma %.4f, change %.2f%% (bound 10%%)",
                    gamma_heat, gamma_smooth, gamma_fine, 100 * smooth.find("l1_gamma_dt_stable").measured)};
}

Outcome rate_equality() {
  auto g = TorusGrid::make(2, 32);
  const ScalarField rho0 = oracle::field_from(g, [](const auto& x) {
    return 1.0 + 0.4 * std::cos(2 * kPi * x[0]) + 0.2 * std::sin(2 * kPi * x[1]);
  });
  const Kernel V = kernel_smooth_fourier(g, {{{1, 0}, 0, 0.0, 1.0}, {{0, 1}, 1, 0.5, 0.0}});
  SolverConfig cfg = solver_cfg(0.05, 5e-4, 1e-3);
  cfg.record_control = true;
  RateOptions ro;
  ro.eta = cfg.eta;

  const ScalarField phi = oracle::field_from(g, [](const auto& x) {
    return 0.3 * std::sin(2 * kPi * x[0]) + 0.2 * std::cos(2 * kPi * (x[0] + x[1]));
  });
  const SolveResult grad = solve_skeleton(rho0, DriftGradient{phi}, V, cfg);
  const double fwd_grad = rate_forward(*grad.realized_control, cfg.dt);
  const double par_grad = rate_par(grad.traj, V, ro).I_par;
  const double gap = std::fabs(par_grad - fwd_grad) / fwd_grad;

  const ControlPath shear = ControlPath::from_function(g, cfg.steps(), cfg.dt, [](double, VectorField& out) {
    for (std::size_t i = 0; i < out.grid().size(); ++i) out.component(0)[i] = 0.8 * std::sin(2 * kPi * out.grid().coordinate(i, 1));
  });
  SolverConfig plain = cfg;
  plain.record_control = false;
  const SolveResult sh = solve_skeleton(rho0, shear, V, plain);
  const double fwd_shear = rate_forward(shear, cfg.dt);
  const double par_shear = rate_par(sh.traj, V, ro).I_par;

  const bool pass = gap <= 0.05 && par_shear <= 1.02 * fwd_shear;
  return {pass, fmt("gradient: I_fwd %.5g I_par %.5g gap %.2f%% (bound 5%%); shear: I_fwd %.5g I_par %.5g (bound 1.02 I_fwd)",
                    fwd_grad, par_grad, 100 * gap, fwd_shear, par_shear)};
}

Outcome weak_convergence() {
  auto g = TorusGrid::make(1, 32);
  const SolverConfig cfg = solver_cfg(0.2, 1e-4);
  const auto rows = weak_convergence_experiment(cosine_density(g, 0.5), kernel_zero(g), ControlPath::zero(g, cfg.steps()),
                                                1.0, {4, 16, 64}, cfg);
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].distance < rows[i - 1].distance;
  const bool pass = decreasing && rows.back().distance <= 0.5 * rows.front().distance;
  return {pass, fmt("L1 path distances m=4: %.4e, m=16: %.4e, m=64: %.4e", rows[0].distance, rows[1].distance, rows[2].distance)};
}

Outcome scaling_regime() {
  std::ostringstream seq;
  bool non_increasing = true;
  double prev = 1e300, last = 0.0;
  for (int j = 1; j <= 6; ++j) {
    const ScalingChoice s = scaling_K(std::pow(10.0, -j), 0.2, 2);
    seq << (j > 1 ? ", " : "") << "K=" << s.K << ":" << s.eps_K_pow;
    non_increasing = non_increasing && s.eps_K_pow <= prev;
    prev = last = s.eps_K_pow;
  }
  const bool pass = non_increasing && last < 1e-2;
  return {pass, "eps K^4 for eps=1e-1..1e-6: " + seq.str() + (non_increasing ? "" : "; not non-increasing") +
                    (last < 1e-2 ? "" : "; final value not < 1e-2")};
}

Outcome monte_carlo_trend() {
  auto g = TorusGrid::make(1, 32);
  const ScalarField rho0 = cosine_density(g, 0.5);
  SolverConfig base = solver_cfg(0.05, 2.5e-4);
  base.record_dissipation = false;
  const ScalarField ref = solve_skeleton(rho0, std::monostate{}, kernel_zero(g), base).traj.snapshots.back();
  const TrajectoryEvent event = tube_exit_event(ref, kTubeRadius);
  McOptions opt;
  opt.seed = 20240601;
  opt.trials = 1000;
  opt.beta = 0.2;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<double> eps{0.1, 0.05, 0.025};
  const auto first = mc_tail(rho0, kernel_zero(g), event, eps, base, opt);
  opt.threads = 1;
  const auto again = mc_tail(rho0, kernel_zero(g), event, eps, base, opt);
  bool strictly = true, reproducible = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (i > 0) strictly = strictly && first[i].hits < first[i - 1].hits;
    reproducible = reproducible && first[i].hits == again[i].hits;
    os << (i ? ", " : "") << "eps=" << first[i].eps << " K=" << first[i].K << " P=" << double(first[i].hits) / first[i].trials;
  }
  return {strictly && reproducible, os.str() + (reproducible ? "; rerun identical" : "; rerun differs")};
}

Outcome kinetic_bands() {
  auto g = TorusGrid::make(1, 64);
  SolverConfig cfg = solver_cfg(0.05, 1e-4);
  cfg.eps = 1e-3;
  cfg.noise = NoiseSpec{build_modes(1, 3), 8, 0};
  const SolveResult r = solve_spde(cosine_density(g, 0.6), kernel_smooth_fourier(g, {{{1}, 0, 0.0, 1.0}}), cfg);
  double lo = 1e300, hi = -1e300;
  for (const auto& s : r.traj.snapshots) {
    lo = std::min(lo, s.min());
    hi = std::max(hi, s.max());
  }
  const double M_high = std::ceil(hi) + 1.0;
  const double M_low = std::ceil(2.0 / lo) + 1.0;
  const KineticBandReport rep = kinetic_band_report(r.traj, {1.0, 2.0, 4.0, M_high, M_low});
  const double high = rep.bands[3].high_mass;
  const double low = rep.bands[4].low_scaled;
  const bool pass = lo > 0.0 && high == 0.0 && low == 0.0;
  return {pass, fmt("rho in [%.3f, %.3f]; M=1,2,4 high %.3e %.3e %.3e; high band at M=%.0f: %.1e; low band at M=%.0f: %.1e",
                    lo, hi, rep.bands[0].high_mass, rep.bands[1].high_mass, rep.bands[2].high_mass, M_high, high, M_low, low)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"heat-equation exactness", heat_exactness},
      {"mass conservation", mass_conservation},
      {"convolution oracle", convolution_oracle},
      {"sigma-family suite", sigma_suite},
      {"noise statistics", noise_statistics},
      {"entropy dissipation", entropy_dissipation},
      {"L1 stability", l1_stability_criterion},
      {"rate-function equality case", rate_equality},
      {"weak-convergence experiment", weak_convergence},
      {"scaling regime", scaling_regime},
      {"Monte Carlo LDP trend", monte_carlo_trend},
      {"kinetic band diagnostics", kinetic_bands},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu: %s  %s  %s  [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
