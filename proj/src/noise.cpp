#include "dk/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dk {

ModeSet build_modes(int d, int K) {
  if (d < 1 || d > 3) throw std::invalid_argument("build_modes: d must be 1, 2 or 3");
  if (K < 0) throw std::invalid_argument("build_modes: K must be >= 0");
  ModeSet m;
  m.d = d;
  m.K = K;
  std::vector<int> k(static_cast<std::size_t>(d), -K);
  const std::int64_t K2 = static_cast<std::int64_t>(K) * K;
  // odometer over the cube [-K, K]^d, keeping the Euclidean ball
  while (true) {
    std::int64_t norm2 = 0;
    for (int v : k) norm2 += static_cast<std::int64_t>(v) * v;
    if (norm2 <= K2) {
      m.kvecs.push_back(k);
      m.N_K += 1;
      m.M_K += norm2;
    }
    int axis = d - 1;
    while (axis >= 0 && k[static_cast<std::size_t>(axis)] == K) {
      k[static_cast<std::size_t>(axis)] = -K;
      --axis;
    }
    if (axis < 0) break;
    ++k[static_cast<std::size_t>(axis)];
  }
  return m;
}

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// (0, 1]
double to_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

double keyed_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t step, std::uint64_t index) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ stream);
  h = splitmix(h ^ step);
  h = splitmix(h ^ index);
  const double u1 = to_unit(h);
  const double u2 = to_unit(splitmix(h ^ 0x632be59bd9b4e019ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoiseSampler::NoiseSampler(const ModeSet& modes, GridPtr grid) : modes_(modes), grid_(std::move(grid)) {
  if (modes_.d != grid_->dim()) throw std::invalid_argument("NoiseSampler: mode set dimension does not match grid");
  const std::size_t nodes = grid_->size();
  sin_.reserve(modes_.kvecs.size());
  cos_.reserve(modes_.kvecs.size());
  for (const auto& k : modes_.kvecs) {
    std::vector<double> s(nodes), c(nodes);
    for (std::size_t idx = 0; idx < nodes; ++idx) {
      // integer phase first keeps the tables exactly periodic
      long long num = 0;
      for (int a = 0; a < modes_.d; ++a) num += static_cast<long long>(k[static_cast<std::size_t>(a)]) * grid_->node_index(idx, a);
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(num % grid_->n()) / grid_->n();
      s[idx] = std::sin(phase);
      c[idx] = std::cos(phase);
    }
    sin_.push_back(std::move(s));
    cos_.push_back(std::move(c));
  }
}

void NoiseSampler::sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t step, double dt,
                          VectorField& out) const {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be positive");
  require_same_grid(out.grid(), *grid_, "sample_increment");
  const double sd = std::sqrt(dt);
  const int d = modes_.d;
  for (int c = 0; c < d; ++c) std::fill(out.component(c).begin(), out.component(c).end(), 0.0);
  for (std::size_t m = 0; m < modes_.kvecs.size(); ++m) {
    for (int c = 0; c < d; ++c) {
      const std::uint64_t base = (static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(c)) * 2;
      const double dB = sd * keyed_normal(seed, stream, step, base);
      const double dW = sd * keyed_normal(seed, stream, step, base + 1);
      simd::axpy(dB, sin_[m], out.component(c));
      simd::axpy(dW, cos_[m], out.component(c));
    }
  }
}

VectorField sample_increment(const NoiseSpec& spec, GridPtr grid, double dt, std::uint64_t step) {
  NoiseSampler sampler(spec.modes, grid);
  VectorField out(grid);
  sampler.sample(spec.seed, spec.stream, step, dt, out);
  return out;
}

VectorField project_control(const VectorField& g, int K) {
  const TorusGrid& grid = g.grid();
  const auto k2 = grid.k_norm_sq();
  const double K2 = static_cast<double>(K) * K;
  std::vector<double> mask(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) mask[i] = k2[i] <= K2 ? 1.0 : 0.0;
  VectorField out(g.grid_ptr());
  std::vector<cplx> spec(grid.size());
  for (int c = 0; c < g.components(); ++c) {
    grid.forward(g.component(c), spec);
    simd::cmul_real(spec, mask, spec);
    grid.inverse(spec, out.component(c));
  }
  return out;
}

ScalingChoice scaling_K(double eps, double beta, int d) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("scaling_K: eps must lie in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("scaling_K: beta must be positive");
  if (!(beta < 1.0 / (d + 2))) {
    throw std::invalid_argument("scaling_K: beta = " + std::to_string(beta) + " violates beta < 1/(d+2)");
  }
  ScalingChoice s;
  const double raw = std::pow(eps, -beta);
  // guard exact powers such as 1e-5^-0.2 = 10 against round-down
  s.K = std::max(1, static_cast<int>(std::floor(raw * (1.0 + 1e-12))));
  s.eps_K_pow = eps * std::pow(static_cast<double>(s.K), d + 2);
  return s;
}

}  // namespace dk
