#include "dk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dk/regularization.hpp"

namespace dk {

// ---------------------------------------------------------------------------
// ControlPath

double ControlPath::energy(double dt) const {
  double acc = 0.0;
  for (const auto& gt : g) {
    double s = 0.0;
    for (int c = 0; c < gt.components(); ++c) s += simd::dot(gt.component(c), gt.component(c));
    acc += dt * gt.grid().cell_volume() * s;
  }
  return acc;
}

ControlPath ControlPath::zero(GridPtr grid, std::size_t steps) {
  ControlPath p;
  p.g.assign(steps, VectorField(grid));
  return p;
}

ControlPath ControlPath::from_function(GridPtr grid, std::size_t steps, double dt,
                                       const std::function<void(double, VectorField&)>& f) {
  ControlPath p;
  p.g.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    VectorField gt(grid);
    f(static_cast<double>(s) * dt, gt);
    p.g.push_back(std::move(gt));
  }
  return p;
}

// ---------------------------------------------------------------------------
// SolverConfig

std::size_t SolverConfig::steps() const {
  const double ratio = T / dt;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
    throw std::invalid_argument("[solver].T / [solver].dt must be a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("[solver].dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("[solver].T must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("[solver].eta must lie in (0, 1)");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("[solver].gamma must lie in [0, 1)");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("[solver].eps must lie in [0, 1)");
  if (snapshot_stride < 1) throw std::invalid_argument("[solver].snapshot_stride must be >= 1");
  if (!(floor > 0.0)) throw std::invalid_argument("[solver].floor must be positive");
  (void)steps();
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(GridPtr grid, const SolverConfig& cfg, const Kernel& V)
    : grid_(std::move(grid)), cfg_(cfg), kernel_(V) {
  require_same_grid(V.field.grid(), *grid_, "Stepper");
  if (V.spec.kind == KernelKind::power && V.spec.gamma == 0.0 && cfg.gamma == 0.0) {
    throw std::invalid_argument("[solver].gamma must be > 0 for power-law kernels");
  }
  if (cfg.gamma > 0.0) kernel_ = mollify_kernel(V, cfg.gamma);

  const std::size_t N = grid_->size();
  const int d = grid_->dim();
  kernel_active_ = lp_norm(kernel_.field, kInf) > 0.0;
  if (kernel_active_) {
    kernel_hat_.assign(static_cast<std::size_t>(d), std::vector<cplx>(N));
    for (int c = 0; c < d; ++c) {
      grid_->forward(kernel_.field.component(c), kernel_hat_[static_cast<std::size_t>(c)]);
      for (auto& z : kernel_hat_[static_cast<std::size_t>(c)]) z *= grid_->cell_volume();
    }
  }
  implicit_inv_.resize(N);
  const auto lap = grid_->laplacian_symbol();
  for (std::size_t k = 0; k < N; ++k) implicit_inv_[k] = 1.0 / (1.0 - cfg.dt * lap[k]);
  if (cfg.noise) {
    const double K2 = static_cast<double>(cfg.noise->modes.K) * cfg.noise->modes.K;
    const auto k2 = grid_->k_norm_sq();
    projection_.resize(N);
    for (std::size_t k = 0; k < N; ++k) projection_[k] = k2[k] <= K2 ? 1.0 : 0.0;
    ito_coeff_ = 0.5 * cfg.eps * static_cast<double>(cfg.noise->modes.N_K);
  }
}

ScalarField Stepper::step(const ScalarField& rho, const VectorField* g_t, const VectorField* dxi) const {
  const TorusGrid& g = *grid_;
  require_same_grid(rho.grid(), g, "step");
  const std::size_t N = g.size();
  const int d = g.dim();
  const double dt = cfg_.dt;
  const double eta = cfg_.eta;

  const bool use_control = g_t != nullptr && simd::max_abs(g_t->data()) > 0.0;
  const bool use_noise = dxi != nullptr && cfg_.eps > 0.0;
  const bool use_ito = ito_coeff_ > 0.0;
  if (use_control) require_same_grid(g_t->grid(), g, "step control");
  if (use_noise) require_same_grid(dxi->grid(), g, "step noise");

  std::vector<cplx> rho_hat(N);
  g.forward(rho.values(), rho_hat);

  std::vector<double> sig_h(N), sig_full(N), ito_w;
  for (std::size_t i = 0; i < N; ++i) {
    sig_h[i] = reg::sigma_half(eta, rho[i]);
    sig_full[i] = sig_h[i] * sig_h[i];
  }
  if (use_ito) {
    ito_w.resize(N);
    const double a = -dt * ito_coeff_;
    for (std::size_t i = 0; i < N; ++i) {
      const double sp = reg::sigma_half_prime(eta, rho[i]);
      ito_w[i] = a * sp * sp;
    }
  }

  std::vector<cplx> acc(N, cplx(0.0, 0.0)), tmp(N);
  std::vector<double> flux(N), work(N);
  const double noise_scale = use_noise ? std::sqrt(cfg_.eps) : 0.0;
  for (int c = 0; c < d; ++c) {
    bool active = false;
    std::fill(flux.begin(), flux.end(), 0.0);
    if (kernel_active_) {
      const auto& vh = kernel_hat_[static_cast<std::size_t>(c)];
      for (std::size_t k = 0; k < N; ++k) tmp[k] = vh[k] * rho_hat[k];
      g.inverse(tmp, work);
      simd::scale(dt, work);
      simd::mul_add(sig_full, work, flux);
      active = true;
    }
    if (use_control) {
      if (!projection_.empty()) {
        g.forward(g_t->component(c), tmp);
        simd::cmul_real(tmp, projection_, tmp);
        g.inverse(tmp, work);
      } else {
        std::copy(g_t->component(c).begin(), g_t->component(c).end(), work.begin());
      }
      simd::scale(dt, work);
      simd::mul_add(sig_h, work, flux);
      active = true;
    }
    if (use_ito) {
      simd::cmul_i_real(rho_hat, g.deriv_symbol(c), tmp);
      g.inverse(tmp, work);
      simd::mul_add(ito_w, work, flux);
      active = true;
    }
    if (use_noise) {
      const auto xi = dxi->component(c);
      for (std::size_t i = 0; i < N; ++i) work[i] = noise_scale * xi[i];
      simd::mul_add(sig_h, work, flux);
      active = true;
    }
    if (active) {
      g.forward(flux, tmp);
      simd::cmul_i_real_add(tmp, g.deriv_symbol(c), acc);
    }
  }

  for (std::size_t k = 0; k < N; ++k) rho_hat[k] -= acc[k];
  simd::cmul_real(rho_hat, implicit_inv_, rho_hat);
  ScalarField out(rho.grid_ptr());
  g.inverse(rho_hat, out.values());
  return out;
}

ScalarField step(const ScalarField& rho, const SolverConfig& cfg, const Kernel& V, const VectorField* g_t,
                 const VectorField* dxi) {
  Stepper s(rho.grid_ptr(), cfg, V);
  return s.step(rho, g_t, dxi);
}

double entropy_integral(const ScalarField& rho, double floor) {
  double acc = 0.0;
  for (double v : rho.values()) acc += reg::psi_entropy(v, floor);
  return rho.grid().cell_volume() * acc;
}

// ---------------------------------------------------------------------------
// Trajectory drivers

namespace {

StepRecord make_record(const ScalarField& rho, double t, const SolverConfig& cfg, double dissipation,
                       double dissipation_cum) {
  StepRecord r;
  r.t = t;
  r.mass = rho.mass();
  r.min = rho.min();
  r.max = rho.max();
  if (cfg.record_dissipation) {
    r.entropy = entropy_integral(rho, cfg.floor);
    r.l2 = lp_norm(rho, 2.0);
  }
  r.dissipation = dissipation;
  r.dissipation_cum = dissipation_cum;
  return r;
}

double sqrt_dirichlet(const ScalarField& rho, double floor) {
  const VectorField gs = grad_sqrt(rho, floor);
  double acc = 0.0;
  for (int c = 0; c < gs.components(); ++c) acc += simd::dot(gs.component(c), gs.component(c));
  return rho.grid().cell_volume() * acc;
}

bool all_finite(const ScalarField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

std::string stability_warning(const SolverConfig& cfg, const TorusGrid& grid, const ScalarField& rho0) {
  const double nk = cfg.noise ? static_cast<double>(cfg.noise->modes.N_K) : 0.0;
  const double scale = std::max(rho0.min(), cfg.eta * cfg.eta);
  const double limit = 0.25 * grid.h() * grid.h() / (1.0 + cfg.eps * nk / (8.0 * scale));
  if (cfg.dt <= limit) return {};
  std::ostringstream os;
  os << "dt = " << cfg.dt << " exceeds the explicit-term heuristic " << limit;
  return os.str();
}

SolveResult run(const ScalarField& rho0, const Kernel& V, const Control& control, const SolverConfig& cfg) {
  cfg.validate();
  const GridPtr& grid = rho0.grid_ptr();
  require_same_grid(V.field.grid(), *grid, "solve");
  const std::size_t steps = cfg.steps();
  const double hd = grid->cell_volume();

  SolveResult res;
  if (rho0.min() < 0.0) throw std::invalid_argument("initial density must be nonnegative");
  if (!std::isfinite(entropy_integral(rho0, cfg.floor))) throw std::invalid_argument("initial density has infinite entropy");
  if (auto w = stability_warning(cfg, *grid, rho0); !w.empty()) res.warnings.push_back(std::move(w));

  const ControlPath* path = std::get_if<ControlPath>(&control);
  const DriftGradient* drift = std::get_if<DriftGradient>(&control);
  if (path != nullptr) {
    if (path->steps() != steps) throw std::invalid_argument("control path has " + std::to_string(path->steps()) + " steps, solver needs " + std::to_string(steps));
    if (path->bound && path->energy(cfg.dt) > *path->bound) throw std::invalid_argument("control energy exceeds its bound N");
  }
  std::optional<VectorField> grad_phi;
  if (drift != nullptr) {
    require_same_grid(drift->phi.grid(), *grid, "drift-gradient control");
    grad_phi = gradient(drift->phi);
  }

  Stepper stepper(grid, cfg, V);
  std::optional<NoiseSampler> sampler;
  std::optional<VectorField> dxi;
  const bool noisy = cfg.noise && cfg.eps > 0.0;
  if (noisy) {
    sampler.emplace(cfg.noise->modes, grid);
    dxi.emplace(grid);
  }
  if (cfg.record_control) res.realized_control.emplace();

  Trajectory& traj = res.traj;
  traj.grid = grid;
  traj.dt = cfg.dt;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(rho0);
  traj.records.reserve(steps + 1);
  traj.records.push_back(make_record(rho0, 0.0, cfg, 0.0, 0.0));

  ScalarField rho = rho0;
  VectorField g_buf(grid);
  double dissipation_cum = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const VectorField* gp = nullptr;
    if (path != nullptr) {
      gp = &path->g[s];
    } else if (drift != nullptr) {
      for (int c = 0; c < grid->dim(); ++c) {
        auto out = g_buf.component(c);
        const auto gphi = grad_phi->component(c);
        for (std::size_t i = 0; i < grid->size(); ++i) out[i] = std::sqrt(std::max(rho[i], 0.0)) * gphi[i];
      }
      gp = &g_buf;
    }
    if (gp != nullptr) {
      double e = 0.0;
      for (int c = 0; c < gp->components(); ++c) e += simd::dot(gp->component(c), gp->component(c));
      res.control_energy += cfg.dt * hd * e;
      if (res.realized_control) res.realized_control->g.push_back(*gp);
    }
    if (noisy) sampler->sample(cfg.noise->seed, cfg.noise->stream, s, cfg.dt, *dxi);

    rho = stepper.step(rho, gp, noisy ? &*dxi : nullptr);
    const double t = static_cast<double>(s + 1) * cfg.dt;
    if (!all_finite(rho)) {
      std::ostringstream os;
      os << "solver blow-up at step " << (s + 1) << " (t = " << t << ", eps = " << cfg.eps
         << ", K = " << (cfg.noise ? cfg.noise->modes.K : 0) << ", dt = " << cfg.dt << ")";
      throw SolverError(os.str(), s + 1);
    }
    if (cfg.positivity == Positivity::clamp_report) {
      double removed = 0.0;
      for (auto& v : rho.values()) {
        if (v < 0.0) {
          removed -= v;
          v = 0.0;
        }
      }
      if (removed > 0.0) {
        ++res.clamp_events;
        res.clamped_mass += hd * removed;
      }
    }
    double dissipation = 0.0;
    if (cfg.record_dissipation) {
      dissipation = sqrt_dirichlet(rho, cfg.floor) * cfg.dt;
      dissipation_cum += dissipation;
    }
    traj.records.push_back(make_record(rho, t, cfg, dissipation, dissipation_cum));
    if ((s + 1) % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || s + 1 == steps) {
      traj.times.push_back(t);
      traj.snapshots.push_back(rho);
    }
  }
  return res;
}

}  // namespace

SolveResult solve_skeleton(const ScalarField& rho0, const Control& g, const Kernel& V, const SolverConfig& cfg) {
  if (cfg.eps != 0.0) throw std::invalid_argument("solve_skeleton: [solver].eps must be 0");
  if (cfg.noise) throw std::invalid_argument("solve_skeleton: noise must be absent");
  return run(rho0, V, g, cfg);
}

SolveResult solve_spde(const ScalarField& rho0, const Kernel& V, const SolverConfig& cfg) {
  if (!cfg.noise) throw std::invalid_argument("solve_spde: [noise] section required");
  return run(rho0, V, std::monostate{}, cfg);
}

SolveResult solve_controlled(const ScalarField& rho0, const Kernel& V, const Control& g, const SolverConfig& cfg) {
  if (std::holds_alternative<std::monostate>(g)) throw std::invalid_argument("solve_controlled: control required");
  return run(rho0, V, g, cfg);
}

}  // namespace dk
