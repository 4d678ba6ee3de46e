#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "dk/grid.hpp"
#include "dk/interaction.hpp"
#include "dk/snapshot.hpp"
#include "oracles.hpp"

using namespace dk;
constexpr double kPi = std::numbers::pi;

TEST_CASE("make_grid shapes and preconditions") {
  auto g1 = TorusGrid::make(1, 8);
  CHECK(g1->size() == 8);
  CHECK(g1->h() == 0.125);
  CHECK(g1->h() * g1->n() == 1.0);

  auto g2 = TorusGrid::make(2, 16);
  CHECK(g2->size() == 256);
  int kmin = 0, kmax = 0;
  for (std::size_t i = 0; i < g2->size(); ++i) {
    for (int k : g2->wavevector(i)) {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
  }
  CHECK(kmin == -8);
  CHECK(kmax == 7);

  CHECK_THROWS_AS(TorusGrid::make(2, 7), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::make(1, 6), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::make(4, 8), std::invalid_argument);
}

TEST_CASE("forward then inverse reproduces a field") {
  auto g = TorusGrid::make(3, 8);
  const auto v = oracle::random_vector(g->size(), 5);
  std::vector<cplx> spec(g->size());
  std::vector<double> back(g->size());
  g->forward(v, spec);
  g->inverse(spec, back);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    err += (back[i] - v[i]) * (back[i] - v[i]);
    ref += v[i] * v[i];
  }
  CHECK(std::sqrt(err / ref) <= 1e-12);
}

TEST_CASE("forward transform matches the naive DFT") {
  auto g = TorusGrid::make(2, 8);
  const auto v = oracle::random_vector(g->size(), 17);
  std::vector<cplx> spec(g->size());
  g->forward(v, spec);
  for (std::size_t k = 0; k < g->size(); k += 7) {
    const auto kv = g->wavevector(k);
    const cplx ref = oracle::dft_coeff(v, {kv.begin(), kv.end()}, 2, 8);
    CHECK(std::abs(spec[k] - ref) <= 1e-12 * 64);
  }
}

TEST_CASE("periodic_convolve: identity element and constants") {
  auto g = TorusGrid::make(2, 8);
  VectorField delta(g);
  const double inv = 1.0 / g->cell_volume();
  delta.component(0)[0] = inv;
  delta.component(1)[0] = inv;
  ScalarField rho(g, oracle::random_vector(g->size(), 3, 0.0, 2.0));
  const VectorField out = periodic_convolve(delta, rho);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(out.component(c)[i] == doctest::Approx(rho[i]).epsilon(1e-13));
  }

  VectorField V(g);
  const auto vx = oracle::random_vector(g->size(), 8);
  std::copy(vx.begin(), vx.end(), V.component(0).begin());
  const double massV = g->cell_volume() * simd::sum(V.component(0));
  ScalarField c3(g, 3.0);
  const VectorField out2 = periodic_convolve(V, c3);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(out2.component(0)[i] == doctest::Approx(3.0 * massV).scale(1.0).epsilon(1e-12));
    CHECK(std::fabs(out2.component(1)[i]) <= 1e-14);
  }
}

TEST_CASE("periodic_convolve matches the direct double sum") {
  for (auto [d, n] : {std::pair{1, 16}, std::pair{2, 8}}) {
    auto g = TorusGrid::make(d, n);
    const auto a = oracle::random_vector(g->size(), 100 + d);
    const auto b = oracle::random_vector(g->size(), 200 + d);
    const ScalarField out = periodic_convolve(ScalarField(g, a), ScalarField(g, b));
    const auto ref = oracle::direct_convolve(a, b, d, n);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::fabs(out[i] - ref[i]) <= 1e-12);
  }
}

TEST_CASE("convolution is translation equivariant and obeys Young's inequality") {
  auto g = TorusGrid::make(1, 16);
  const auto a = oracle::random_vector(16, 1);
  const auto b = oracle::random_vector(16, 2);
  std::vector<double> shifted(16);
  for (int i = 0; i < 16; ++i) shifted[static_cast<std::size_t>((i + 1) % 16)] = b[static_cast<std::size_t>(i)];
  const ScalarField c = periodic_convolve(ScalarField(g, a), ScalarField(g, b));
  const ScalarField cs = periodic_convolve(ScalarField(g, a), ScalarField(g, shifted));
  for (int i = 0; i < 16; ++i) CHECK(cs[static_cast<std::size_t>((i + 1) % 16)] == doctest::Approx(c[static_cast<std::size_t>(i)]).epsilon(1e-12));
  CHECK(lp_norm(c, 1.0) <= lp_norm(ScalarField(g, a), 1.0) * lp_norm(ScalarField(g, b), 1.0) + 1e-10);
}

TEST_CASE("spectral operators") {
  auto g = TorusGrid::make(2, 16);
  ScalarField c(g, 2.5);
  CHECK(lp_norm(gradient(c), kInf) == 0.0);
  CHECK(lp_norm(laplacian(c), kInf) <= 1e-12);

  const ScalarField s = oracle::field_from(g, [](const auto& x) { return std::sin(2 * kPi * x[0]); });
  const ScalarField lap = laplacian(s);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::fabs(lap[i] + 4 * kPi * kPi * s[i]) <= 1e-10);

  VectorField F(g);
  const auto r = oracle::random_vector(F.data().size(), 9);
  std::copy(r.begin(), r.end(), F.data().begin());
  CHECK(std::fabs(divergence(F).mass()) <= 1e-12);

  ScalarField f(g, oracle::random_vector(g->size(), 10));
  const ScalarField dg = divergence(gradient(f));
  const ScalarField lf = laplacian(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::fabs(dg[i] - lf[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("grad_sqrt") {
  auto g = TorusGrid::make(1, 64);
  CHECK(lp_norm(grad_sqrt(ScalarField(g, 4.0)), kInf) <= 1e-12);
  CHECK(lp_norm(grad_sqrt(ScalarField(g, 0.0)), kInf) <= 1e-12);
  const ScalarField rho = oracle::field_from(g, [](const auto& x) {
    const double s = 1.0 + 0.5 * std::sin(2 * kPi * x[0]);
    return s * s;
  });
  const VectorField gs = grad_sqrt(rho);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    CHECK(std::fabs(gs.component(0)[i] - kPi * std::cos(2 * kPi * g->coordinate(i, 0))) <= 1e-8);
  }
}

TEST_CASE("norms") {
  auto g = TorusGrid::make(2, 8);
  ScalarField one(g, 1.0);
  for (double p : {1.0, 2.0, 3.5, kInf}) CHECK(lp_norm(one, p) == doctest::Approx(1.0).epsilon(1e-14));

  const ScalarField half = oracle::field_from(g, [](const auto& x) { return x[0] < 0.5 ? 1.0 : 0.0; });
  CHECK(lp_norm(half, 1.0) == doctest::Approx(0.5));
  CHECK(l1_distance(half, one) == doctest::Approx(0.5));

  auto g1 = TorusGrid::make(1, 32);
  const ScalarField s = oracle::field_from(g1, [](const auto& x) { return std::sin(2 * kPi * x[0]); });
  const double expected = (1.0 / std::sqrt(2.0)) / (1.0 + 4 * kPi * kPi);
  CHECK(h_neg_s_norm(s, 2.0) == doctest::Approx(expected).epsilon(1e-12));

  // direct mode sum with c_k = F_k / N
  std::vector<double> sv(s.values().begin(), s.values().end());
  double acc = 0.0;
  for (int k = -16; k < 16; ++k) {
    const cplx ck = oracle::dft_coeff(sv, {k}, 1, 32) / 32.0;
    acc += std::pow(1.0 + 4 * kPi * kPi * k * k, -2.0) * std::norm(ck);
  }
  CHECK(h_neg_s_norm(s, 2.0) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
  CHECK_THROWS(lp_norm(s, 0.5));
}

TEST_CASE("grid mismatch is rejected") {
  auto a = TorusGrid::make(1, 8);
  auto b = TorusGrid::make(1, 16);
  CHECK_THROWS_AS(periodic_convolve(ScalarField(a), ScalarField(b)), std::invalid_argument);
  CHECK_THROWS_AS(l1_distance(ScalarField(a), ScalarField(b)), std::invalid_argument);
}

TEST_CASE("snapshot files round trip") {
  auto g = TorusGrid::make(2, 8);
  ScalarField f(g, oracle::random_vector(g->size(), 4));
  const auto path = std::filesystem::temp_directory_path() / "dk_snapshot_test.bin";
  write_snapshot(path, f);
  const Snapshot s = read_snapshot(path);
  CHECK(s.d == 2);
  CHECK(s.n == 8);
  CHECK(s.components == 1);
  const ScalarField back = to_scalar_field(s, g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

  VectorField V(g);
  V.component(1)[3] = 7.0;
  write_snapshot(path, V);
  const Snapshot sv = read_snapshot(path);
  CHECK(sv.components == 2);
  CHECK(sv.values[g->size() + 3] == 7.0);

  {
    std::ofstream bad(path, std::ios::binary);
    bad << "XXXX";
  }
  CHECK_THROWS_AS(read_snapshot(path), std::runtime_error);
  std::filesystem::remove(path);
}
