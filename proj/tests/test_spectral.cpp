#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lifschitz/errors.hpp"
#include "lifschitz/spectral.hpp"
#include "lifschitz/stable_kernel.hpp"

using namespace lifschitz;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> bumpy_potential(int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = 2.0 + std::sin(2.0 * kPi * i / n) + 0.5 * std::cos(6.0 * kPi * i / n);
  return v;
}
}  // namespace

TEST_CASE("free torus spectrum is the multiplier") {
  const auto op = build_torus_operator_from_samples(1, 1, 8, 2.0, std::vector<double>(8, 0.0));
  const auto ev = all_eigenvalues(op);
  const double w = 4.0 * kPi * kPi;
  const std::vector<double> expect{0, w, w, 4 * w, 4 * w, 9 * w, 9 * w, 16 * w};
  REQUIRE(ev.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(ev[i] == Approx(expect[i]).epsilon(1e-12).scale(1.0));
  CHECK(ev[1] == Approx(39.47841760435743).epsilon(1e-12));

  const auto s = eigenvalues(build_torus_operator_from_samples(1, 1, 8, 1.0, std::vector<double>(8, 0.0)), 3);
  CHECK(s.eigenvalues[0] == Approx(0.0).scale(1.0));
  CHECK(s.eigenvalues[1] == Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(s.eigenvalues[2] == Approx(2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("constant potential shifts the spectrum") {
  const int n = 32;
  const auto base = all_eigenvalues(build_torus_operator_from_samples(1, 2, n, 1.3, bumpy_potential(n)));
  auto v = bumpy_potential(n);
  for (double& x : v) x += 0.75;
  const auto shifted = all_eigenvalues(build_torus_operator_from_samples(1, 2, n, 1.3, v));
  for (int i = 0; i < n; ++i) CHECK(shifted[i] - base[i] == Approx(0.75).epsilon(1e-10));
}

TEST_CASE("variational bounds on the ground state") {
  const int n = 64;
  const auto v = bumpy_potential(n);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  const double l1 = eigenvalues(build_torus_operator_from_samples(1, 1, n, 0.8, v), 1).eigenvalues.front();
  CHECK(l1 >= *std::min_element(v.begin(), v.end()));
  CHECK(l1 <= mean + 1e-12);
  CHECK_THROWS_AS(build_torus_operator_from_samples(1, 1, 8, 1.0, {0, -1, 0, 0, 0, 0, 0, 0}), DomainError);
}

TEST_CASE("potential-only operator has the sorted samples as spectrum") {
  const auto v = bumpy_potential(16);
  const auto op = build_torus_operator_from_samples(1, 1, 16, 1.0, v).potential_only();
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const auto ev = all_eigenvalues(op);
  for (int i = 0; i < 16; ++i) CHECK(ev[i] == Approx(sorted[i]).epsilon(1e-14));
}

TEST_CASE("dense and Lanczos solvers agree") {
  for (double a : {0.7, 1.5, 2.0}) {
    const auto op = build_torus_operator_from_samples(1, 2, 128, a, bumpy_potential(128));
    const auto dense = eigenvalues(op, 4, {Solver::dense});
    const auto lanczos = eigenvalues(op, 4, {Solver::lanczos});
    for (int i = 0; i < 4; ++i) CHECK(lanczos.eigenvalues[i] == Approx(dense.eigenvalues[i]).epsilon(1e-9));
    CHECK(lanczos.residuals[0] < 1e-8);
  }
  const auto dir = build_dirichlet_operator(Domain::ball(1, 1.0), 1.0, 128);
  CHECK(eigenvalues(dir, 1, {Solver::lanczos}).eigenvalues[0] ==
        Approx(eigenvalues(dir, 1, {Solver::dense}).eigenvalues[0]).epsilon(1e-9));
}

TEST_CASE("Dirichlet interval ground states") {
  const auto a2 = ball_ground_state(1.0, 2.0, {256, 512, 1024});
  CHECK(a2.lambda == Approx(kPi * kPi / 4.0).epsilon(1e-4));
  const auto a1 = ball_ground_state(1.0, 1.0, {256, 512, 1024});
  CHECK(a1.lambda > 1.0);
  CHECK(a1.lambda < kPi / 2.0);
  // literature value 1.1577738836977 for the Cauchy process on (−1, 1)
  CHECK(a1.lambda == Approx(1.1577738836977).epsilon(1e-4));
  // domain monotonicity
  CHECK(all_eigenvalues(build_dirichlet_operator(Domain::ball(1, 1.0), 1.0, 128)).front() >
        all_eigenvalues(build_dirichlet_operator(Domain::ball(1, 2.0), 1.0, 256)).front());
}

TEST_CASE("ball scaling") {
  CHECK(ball_ground_state(2.0, 2.0, {128, 256, 512}).lambda == Approx(kPi * kPi / 16.0).epsilon(1e-3));
  const auto b1 = ball_ground_state(1.0, 1.5, {128, 256, 512});
  const auto b2 = ball_ground_state(2.0, 1.5, {256, 512, 1024});
  CHECK(b2.lambda_unit == Approx(b1.lambda_unit).epsilon(1e-2));
  double prev = 1e300;
  for (double r : {0.5, 1.0, 2.0, 4.0}) {
    const double l = all_eigenvalues(build_dirichlet_operator(Domain::ball(1, r), 1.2, 128)).front();
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("Richardson rejects non-converging sequences") {
  CHECK_THROWS_AS(richardson({{64, 1.0}, {128, 1.2}, {256, 1.1}}, 1.0), ConvergenceError);
  CHECK_THROWS_AS(richardson({{64, 1.0}, {128, 1.1}, {256, 1.3}}, 1.0), ConvergenceError);
  CHECK_THROWS_AS(richardson({{64, 1.0}, {100, 1.1}, {256, 1.15}}, 1.0), ConfigurationError);
  const auto r = richardson({{64, 1.0 + 1.0 / 64}, {128, 1.0 + 1.0 / 128}, {256, 1.0 + 1.0 / 256}}, 1.0);
  CHECK(r.lambda == Approx(1.0).epsilon(1e-13));
}

TEST_CASE("unit ball eigenvalues") {
  CHECK(unit_ball_eigenvalue(1, 2.0) == Approx(kPi * kPi / 4.0));
  CHECK(unit_ball_eigenvalue(3, 2.0) == Approx(kPi * kPi));
  CHECK(unit_ball_eigenvalue(2, 2.0) == Approx(2.404825557695773 * 2.404825557695773));
  CHECK(unit_ball_eigenvalue(1, 1.0) == Approx(1.1577738836977).epsilon(1e-4));
}

TEST_CASE("rate constant") {
  const double lambda = kPi * kPi / 4.0;
  CHECK(rate_constant(1, 2.0, lambda) == Approx(4.0538515350952352829).epsilon(1e-13));
  CHECK(rate_constant(1, 2.0, 2.0 * lambda) / rate_constant(1, 2.0, lambda) == Approx(std::pow(2.0, 1.0 / 3.0)));
  CHECK(rate_constant(2, 1.0, 3.0) / rate_constant(2, 1.0, 1.5) == Approx(std::pow(2.0, 2.0 / 3.0)));
}

TEST_CASE("rate function minimization") {
  const double lambda = kPi * kPi / 4.0;
  const auto r = rate_function(1.0, 1, 2.0, lambda);
  CHECK(r.value == Approx(4.0538515350952352829).epsilon(1e-10));
  CHECK(r.minimizer == Approx(1.3512838450317450943).epsilon(1e-8));
  CHECK(std::abs(r.stationarity) < 1e-8);
  for (auto [d, a] : {std::pair{1, 1.0}, std::pair{1, 2.0}, std::pair{2, 1.5}}) {
    const double lam = a == 2.0 ? lambda : 1.3;
    const double ratio = rate_function(2.0, d, a, lam).value / rate_function(1.0, d, a, lam).value;
    CHECK(ratio == Approx(std::pow(2.0, a / (d + a))).epsilon(1e-9));
  }
}

TEST_CASE("grid and domain validation") {
  CHECK_THROWS_AS(build_dirichlet_operator(Domain::ball(1, 1.0), 1.0, 64, 2), ConfigurationError);
  CHECK_THROWS_AS(build_dirichlet_operator(Domain::ball(2, 1.0), 1.0, 16, 0), ConfigurationError);
  const auto op = build_dirichlet_operator(Domain::ball(2, 1.0), 1.5, 12, 3);
  CHECK(op.size() > 0);
  for (const auto& x : op.nodes()) CHECK(Domain::ball(2, 1.0).contains(x));
}
