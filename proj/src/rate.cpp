#include "dk/rate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "dk/regularization.hpp"

namespace dk {

double rate_forward(const ControlPath& g, double dt) { return 0.5 * g.energy(dt); }

// ---------------------------------------------------------------------------
// Weighted Poisson solve

ScalarField weighted_operator(const ScalarField& rho, const ScalarField& psi, double floor) {
  require_same_grid(rho.grid(), psi.grid(), "weighted_operator");
  VectorField flux = gradient(psi);
  for (int c = 0; c < flux.components(); ++c) {
    auto comp = flux.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= -std::max(rho[i], floor);
  }
  return divergence(flux);
}

namespace {

// Modes on which every truncated derivative symbol vanishes: k = 0 and the
// Nyquist combinations. They form the kernel of the operator.
void remove_null_modes(const TorusGrid& g, std::span<double> f, std::vector<cplx>& scratch) {
  const auto lap = g.laplacian_symbol();
  g.forward(std::span<const double>(f.data(), f.size()), scratch);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (lap[k] == 0.0) scratch[k] = 0.0;
  }
  g.inverse(scratch, f);
}

}  // namespace

RieszSolution riesz_solve(const ScalarField& rho, const ScalarField& residual, const RieszOptions& opt) {
  require_same_grid(rho.grid(), residual.grid(), "riesz_potential");
  const TorusGrid& g = residual.grid();
  const std::size_t N = g.size();
  const double l1 = lp_norm(residual, 1.0);
  const double mass = residual.mass();
  if (std::fabs(mass) > 1e-8 * std::max(1.0, l1)) {
    std::ostringstream os;
    os << "riesz_potential: residual mass " << mass << " is not zero";
    throw std::invalid_argument(os.str());
  }

  RieszSolution sol{ScalarField(residual.grid_ptr()), 0.0, 0};
  std::vector<cplx> scratch(N);
  std::vector<double> b(residual.values().begin(), residual.values().end());
  remove_null_modes(g, b, scratch);
  const double bnorm = std::sqrt(simd::dot(b, b));
  if (bnorm == 0.0) return sol;

  double wbar = 0.0;
  for (std::size_t i = 0; i < N; ++i) wbar += std::max(rho[i], opt.floor);
  wbar /= static_cast<double>(N);
  const auto lap = g.laplacian_symbol();
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    g.forward(in, scratch);
    for (std::size_t k = 0; k < N; ++k) scratch[k] = lap[k] == 0.0 ? cplx(0.0) : scratch[k] / (-wbar * lap[k]);
    g.inverse(scratch, out);
  };

  std::vector<double> x(N, 0.0), r = b, z(N), p(N);
  ScalarField pf(residual.grid_ptr());
  precondition(r, z);
  p = z;
  double rz = simd::dot(r, z);
  double rnorm = bnorm;
  int it = 0;
  for (; it < opt.max_iter && rnorm > opt.rel_tol * bnorm; ++it) {
    std::copy(p.begin(), p.end(), pf.values().begin());
    const ScalarField Ap = weighted_operator(rho, pf, opt.floor);
    const double pAp = simd::dot(p, Ap.values());
    if (!(pAp > 0.0)) break;
    const double alpha = rz / pAp;
    simd::axpy(alpha, p, x);
    simd::axpy(-alpha, Ap.values(), r);
    // keep the residual in the range of the operator against round-off
    if ((it + 1) % 50 == 0) remove_null_modes(g, r, scratch);
    rnorm = std::sqrt(simd::dot(r, r));
    precondition(r, z);
    const double rz_new = simd::dot(r, z);
    simd::xpay(z, rz_new / rz, p);
    rz = rz_new;
  }
  remove_null_modes(g, x, scratch);
  std::copy(x.begin(), x.end(), sol.psi.values().begin());

  // true residual of the returned iterate
  const ScalarField Ax = weighted_operator(rho, sol.psi, opt.floor);
  std::vector<double> res(b);
  simd::axpy(-1.0, Ax.values(), res);
  sol.rel_residual = std::sqrt(simd::dot(res, res)) / bnorm;
  sol.iterations = it;
  if (!(sol.rel_residual <= opt.rel_tol * 10.0)) {
    std::ostringstream os;
    os << "riesz_potential: no convergence after " << it << " iterations (relative residual " << sol.rel_residual
       << ", min rho " << rho.min() << ", weight ratio " << rho.max() / std::max(rho.min(), opt.floor) << ")";
    throw RieszError(os.str());
  }
  return sol;
}

// ---------------------------------------------------------------------------

RateResult rate_par(const Trajectory& traj, const Kernel& V, const RateOptions& opt) {
  if (traj.size() < 2) throw std::invalid_argument("rate_par: need at least two snapshots");
  const double dt = traj.dt;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (std::fabs(traj.times[i] - traj.times[i - 1] - dt) > 1e-9 * dt) {
      throw std::invalid_argument("rate_par: snapshots must be stored every step");
    }
  }
  const GridPtr& grid = traj.grid;
  require_same_grid(V.field.grid(), *grid, "rate_par");
  const bool kernel_active = lp_norm(V.field, kInf) > 0.0;
  const std::size_t slices = traj.size() - 1;
  const double hd = grid->cell_volume();

  RateResult out;
  out.floor = opt.floor;
  out.residual_norm.assign(slices, 0.0);
  if (opt.keep_potentials) out.potential.assign(slices, ScalarField(grid));
  std::vector<double> contrib(slices, 0.0);

  RieszOptions ropt = opt.riesz;
  ropt.floor = opt.floor;
  for (std::size_t s = 0; s < slices; ++s) {
    const ScalarField& r0 = traj.snapshots[s];
    const ScalarField& r1 = traj.snapshots[s + 1];
    ScalarField res = laplacian(r1);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = (r1[i] - r0[i]) / dt - res[i];
    if (kernel_active) {
      VectorField flux = periodic_convolve(V.field, r0);
      for (int c = 0; c < flux.components(); ++c) {
        auto comp = flux.component(c);
        for (std::size_t i = 0; i < comp.size(); ++i) {
          const double w = opt.eta > 0.0 ? reg::sigma(opt.eta, r0[i]) : r0[i];
          comp[i] *= w;
        }
      }
      const ScalarField dv = divergence(flux);
      simd::axpy(1.0, dv.values(), res.values());
    }
    const RieszSolution sol = riesz_solve(r0, res, ropt);
    const VectorField gp = gradient(sol.psi);
    double acc = 0.0;
    for (int c = 0; c < gp.components(); ++c) {
      const auto comp = gp.component(c);
      for (std::size_t i = 0; i < comp.size(); ++i) acc += std::max(r0[i], opt.floor) * comp[i] * comp[i];
    }
    contrib[s] = 0.5 * dt * hd * acc;
    out.residual_norm[s] = sol.rel_residual;
    if (opt.keep_potentials) out.potential[s] = sol.psi;
  }
  for (double c : contrib) out.I_par += c;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<WeakConvergenceRow> weak_convergence_experiment(const ScalarField& rho0, const Kernel& V,
                                                            const ControlPath& g, double A,
                                                            const std::vector<int>& m_list,
                                                            const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.record_dissipation = false;
  const SolveResult base = solve_skeleton(rho0, g, V, c);
  std::vector<WeakConvergenceRow> rows;
  for (int m : m_list) {
    ControlPath gm = g;
    for (std::size_t s = 0; s < gm.g.size(); ++s) {
      const double t = static_cast<double>(s) * c.dt;
      const double shift = A * std::sin(2.0 * std::numbers::pi * m * t);
      for (double& v : gm.g[s].component(0)) v += shift;
    }
    const SolveResult run = solve_skeleton(rho0, gm, V, c);
    double dist = 0.0;
    for (std::size_t i = 1; i < base.traj.size(); ++i) {
      const double a = l1_distance(base.traj.snapshots[i - 1], run.traj.snapshots[i - 1]);
      const double b = l1_distance(base.traj.snapshots[i], run.traj.snapshots[i]);
      dist += 0.5 * (base.traj.times[i] - base.traj.times[i - 1]) * (a + b);
    }
    rows.push_back({m, dist});
  }
  return rows;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

TrajectoryEvent tube_exit_event(ScalarField reference, double radius) {
  return [ref = std::move(reference), radius](const Trajectory& traj) {
    return l1_distance(traj.snapshots.back(), ref) > radius;
  };
}

std::vector<TailEstimate> mc_tail(const ScalarField& rho0, const Kernel& V, const TrajectoryEvent& event,
                                  const std::vector<double>& eps_list, const SolverConfig& base,
                                  const McOptions& opt) {
  if (opt.trials == 0) throw std::invalid_argument("[mc].trials must be positive");
  const int d = rho0.grid().dim();
  std::vector<TailEstimate> out;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    const double eps = eps_list[e];
    const ScalingChoice sc = scaling_K(eps, opt.beta, d);
    SolverConfig cfg = base;
    cfg.eps = eps;
    cfg.record_dissipation = false;
    cfg.snapshot_stride = static_cast<int>(cfg.steps());
    NoiseSpec spec{build_modes(d, sc.K), opt.seed, 0};
    std::vector<char> hit(opt.trials, 0);
    parallel_for(opt.trials, opt.threads, [&](std::size_t i) {
      SolverConfig local = cfg;
      NoiseSpec ns = spec;
      ns.stream = (static_cast<std::uint64_t>(e) << 32) | static_cast<std::uint64_t>(i);
      local.noise = std::move(ns);
      const SolveResult r = solve_spde(rho0, V, local);
      hit[i] = event(r.traj) ? 1 : 0;
    });
    TailEstimate t;
    t.eps = eps;
    t.K = sc.K;
    t.trials = opt.trials;
    for (char h : hit) t.hits += static_cast<std::size_t>(h);
    if (t.hits == 0) {
      t.censored = true;
      t.estimate = -std::numeric_limits<double>::infinity();
    } else {
      const double p = static_cast<double>(t.hits) / static_cast<double>(t.trials);
      t.estimate = eps * std::log(p);
      t.stderr_ = eps * std::sqrt((1.0 - p) / (p * static_cast<double>(t.trials)));
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace dk
