#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dk/regularization.hpp"
#include "oracles.hpp"

using namespace dk;
using namespace dk::reg;

namespace {

Trajectory constant_path(GridPtr g, const ScalarField& rho, int steps, double T) {
  Trajectory tr;
  tr.grid = g;
  tr.dt = T / steps;
  for (int s = 0; s <= steps; ++s) {
    tr.times.push_back(s * tr.dt);
    tr.snapshots.push_back(rho);
  }
  return tr;
}

}  // namespace

TEST_CASE("sigma^{1/2,eta} bounds") {
  for (double eta : {0.5, 0.1, 0.01}) {
    CAPTURE(eta);
    CHECK(sigma_half(eta, -1.0) == 0.0);
    CHECK(sigma_half(eta, 0.0) == 0.0);
    for (int i = 1; i <= 400; ++i) {
      const double z = std::pow(10.0, -6.0 + 0.025 * i);  // 1e-6 .. 1e4
      const double s = sigma_half(eta, z);
      CHECK(s >= 0.0);
      CHECK(s <= std::sqrt(z) * (1 + 1e-14));
      CHECK(s <= 1.0 / eta);
      const double ds = sigma_half_prime(eta, z);
      CHECK(ds >= 0.0);
      CHECK(ds <= std::min(1.0 / (2 * eta), 1.0 / (2 * std::sqrt(z))) * (1 + 1e-12));
      // centered difference
      const double hz = 1e-6 * z;
      const double fd = (sigma_half(eta, z + hz) - sigma_half(eta, z - hz)) / (2 * hz);
      CHECK(ds == doctest::Approx(fd).epsilon(1e-5));
      CHECK(sigma(eta, z) == doctest::Approx(s * s));
    }
  }
  // converges to sqrt on bounded sets
  for (int i = 0; i <= 100; ++i) {
    const double z = i / 100.0;
    CHECK(std::sqrt(z) - sigma_half(0.01, z) <= 0.02);
  }
  CHECK_THROWS_AS((RegParams{0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((RegParams{1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW(RegParams{}.validate());
}

TEST_CASE("entropy density") {
  CHECK(psi_entropy(0.0) == 0.0);
  CHECK(psi_entropy(-3.0) == 0.0);
  CHECK(psi_entropy(1.0) == -1.0);
  CHECK(psi_entropy(std::numbers::e) == doctest::Approx(0.0).scale(1.0));
  CHECK(psi_entropy(2.0) == doctest::Approx(2 * std::log(2.0) - 2));
  for (double z = 0.01; z < 5; z += 0.01) CHECK(psi_entropy(z) >= -1.0);
}

TEST_CASE("zeta^M cutoff") {
  CHECK(zeta_trunc(2, 0.4) == 0.0);
  CHECK(zeta_trunc(2, 1.5) == 1.0);
  CHECK(zeta_trunc(2, 2.5) == doctest::Approx(0.5));
  CHECK(zeta_trunc(2, 3.5) == 0.0);
  CHECK(zeta_trunc(4, 0.375) == doctest::Approx(0.5));
  for (double x = -6; x <= 6; x += 0.01) {
    const double v = zeta_trunc(3, x);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == zeta_trunc(3, -x));
  }
}

TEST_CASE("log^{M,eps}") {
  CHECK(log_trunc(5, 0.01, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-4));
  CHECK(log_trunc(5, 0.01, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-4));
  CHECK(log_trunc(2, 0.01, 100.0) == doctest::Approx(2.0));
  CHECK(log_trunc(2, 0.01, -1.0) == doctest::Approx(-2.0));
  CHECK(log_trunc(2, 0.01, 0.0) == doctest::Approx(-2.0));
  double prev = -1e300;
  for (double x = -0.5; x < 10; x += 0.05) {
    const double v = log_trunc(2, 0.1, x);
    CHECK(v >= prev - 1e-12);
    CHECK(std::fabs(v) <= 2.0 + 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(log_trunc(0, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(log_trunc(1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("psi_delta and h_delta") {
  CHECK(h_delta(0.1, 0.04) == 0.0);
  CHECK(h_delta(0.1, 0.2) == doctest::Approx(0.2));
  CHECK(psi_delta(0.1, 0.05) == 0.0);
  CHECK(psi_delta(0.1, 0.1) == 1.0);
  CHECK(psi_delta(0.1, 0.075) == doctest::Approx(0.5));
  // slope bound by finite differences
  for (double delta : {1.0, 0.25, 0.01}) {
    double worst = 0.0;
    const double step = delta / 1000;
    for (double z = 0; z < 2 * delta; z += step) worst = std::max(worst, std::fabs(psi_delta(delta, z + step) - psi_delta(delta, z)) / step);
    CHECK(worst <= kPsiDeltaSlope / delta * (1 + 1e-6));
  }
  CHECK_THROWS_AS(psi_delta(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(psi_delta(1.5, 1.0), std::invalid_argument);
}

TEST_CASE("theta window mass") {
  auto g = TorusGrid::make(1, 64);
  const ScalarField rho = oracle::field_from(g, [](const auto& x) { return 1.0 + 0.5 * std::sin(2 * std::numbers::pi * x[0]); });
  const Trajectory tr = constant_path(g, rho, 4, 2.0);
  // int_0^1 (pi cos 2 pi x)^2 dx = pi^2 / 2, over T = 2
  const double all = std::numbers::pi * std::numbers::pi;
  CHECK(theta_window_mass(tr, 0.0, 2.0) == doctest::Approx(all).epsilon(1e-10));
  // strict window drops the two nodes where rho = 1 and cos^2 = 1: 15 of 32 units remain
  CHECK(theta_window_mass(tr, 1.0, 2.0) == doctest::Approx(15.0 / 32.0 * all).epsilon(1e-10));
  CHECK(theta_window_mass(tr, 3.0, 4.0) == 0.0);
  CHECK_THROWS_AS(theta_window_mass(tr, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("path metric D") {
  auto g = TorusGrid::make(1, 16);
  const Trajectory zero = constant_path(g, ScalarField(g, 0.0), 10, 1.0);
  const Trajectory one = constant_path(g, ScalarField(g, 1.0), 10, 1.0);
  CHECK(path_metric_D(zero, one) == doctest::Approx(0.5 * (1 - std::ldexp(1.0, -20))).epsilon(1e-14));
  CHECK(path_metric_D(zero, zero) == 0.0);
  CHECK(path_metric_D(zero, one, 40) - path_metric_D(zero, one, 20) <= std::ldexp(1.0, -20));

  std::vector<Trajectory> r;
  for (int s = 0; s < 3; ++s) {
    Trajectory t = zero;
    for (std::size_t i = 0; i < t.size(); ++i) {
      t.snapshots[i] = ScalarField(g, oracle::random_vector(16, 100 * s + i, 0.0, 2.0));
    }
    r.push_back(t);
  }
  const double ab = path_metric_D(r[0], r[1]);
  CHECK(ab == doctest::Approx(path_metric_D(r[1], r[0])));
  CHECK(ab <= path_metric_D(r[0], r[2]) + path_metric_D(r[2], r[1]) + 1e-14);
  CHECK(ab < 1.0);

  Trajectory shifted = one;
  shifted.times[3] += 1e-3;
  CHECK_THROWS_AS(path_metric_D(zero, shifted), std::invalid_argument);
}
