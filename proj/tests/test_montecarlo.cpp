#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lifschitz/errors.hpp"
#include "lifschitz/montecarlo.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/stats.hpp"

using namespace lifschitz;
using doctest::Approx;

namespace {
std::vector<double> draws(double alpha, double dt, long n, std::uint64_t seed) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = sample_stable_increment(1, alpha, dt, derive_key({seed, static_cast<std::uint64_t>(i)}))[0];
  return out;
}

std::vector<double> marginal(const BridgeSampler& s, const Point& x, const Point& y, double t, int n, int j, long count,
                             std::uint64_t seed) {
  std::vector<double> out;
  for (long i = 0; i < count; ++i)
    out.push_back(s.sample(x, y, t, n, derive_key({seed, static_cast<std::uint64_t>(i)})).points[j][0]);
  return out;
}
}  // namespace

TEST_CASE("Gaussian increments have variance 2 dt") {
  const auto z = draws(2.0, 1.0, 1'000'000, 1);
  CHECK(stats::sample_variance(z) == Approx(2.0).epsilon(0.005));
}

TEST_CASE("Cauchy increments: median and tail") {
  auto z = draws(1.0, 1.0, 1'000'000, 2);
  long tail = 0;
  for (double v : z) tail += std::abs(v) > 10.0;
  std::nth_element(z.begin(), z.begin() + z.size() / 2, z.end());
  CHECK(std::abs(z[z.size() / 2]) < 0.005);
  CHECK(static_cast<double>(tail) / 1e6 == Approx(0.06345103486110713903).epsilon(0.002 / 0.0635));
}

TEST_CASE("self-similarity of increments") {
  for (double a : {0.6, 1.3, 2.0}) {
    const auto big = draws(a, 4.0, 100'000, 3);
    auto small = draws(a, 1.0, 100'000, 4);
    for (double& v : small) v *= std::pow(4.0, 1.0 / a);
    CHECK(stats::ks_two_sample(big, small).p_value > 0.01);
  }
}

TEST_CASE("d = 3 Gaussian increments are isotropic with variance 2 dt per axis") {
  std::vector<double> axis;
  for (int i = 0; i < 100'000; ++i) axis.push_back(sample_stable_increment(3, 2.0, 0.5, derive_key({9, (std::uint64_t)i}))[2]);
  CHECK(stats::sample_variance(axis) == Approx(1.0).epsilon(0.02));
}

TEST_CASE("Brownian bridge midpoint variance is t/2") {
  for (bool exact : {true, false}) {
    BridgeOptions o;
    o.exact_gaussian = exact;
    const BridgeSampler b(StableKernel(1, 2.0), PathGeometry::free(), o);
    const auto mid = marginal(b, Point{0.0}, Point{0.0}, 1.0, 2, 1, 10'000, 17);
    const double var = stats::sample_variance(mid);
    // Var(s²) ≈ 2σ⁴/(n−1) for a normal sample
    CHECK(std::abs(var - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / 9999.0));
  }
}

TEST_CASE("bridge reversibility and refinement consistency") {
  for (double a : {1.0, 1.5}) {
    const BridgeSampler s(StableKernel(1, a), PathGeometry::free());
    const Point x{0.0}, y{1.0};
    // forward node 1 of 4 against reversed node 3 of 4
    const auto fwd = marginal(s, x, y, 1.0, 4, 1, 4000, 21);
    const auto rev = marginal(s, y, x, 1.0, 4, 3, 4000, 22);
    CHECK(stats::ks_two_sample(fwd, rev).p_value > 0.01);
    // time t/2 as node 1 of 2 and node 2 of 4
    const auto coarse = marginal(s, x, y, 1.0, 2, 1, 4000, 23);
    const auto fine = marginal(s, x, y, 1.0, 4, 2, 4000, 24);
    CHECK(stats::ks_two_sample(coarse, fine).p_value > 0.01);
  }
}

TEST_CASE("endpoints of a bridge are pinned") {
  const BridgeSampler s(StableKernel(1, 0.8), PathGeometry::torus(2));
  const auto sk = s.sample(Point{0.3}, Point{1.7}, 0.6, 8, 5);
  CHECK(sk.points.front()[0] == 0.3);
  CHECK(sk.points.back()[0] == 1.7);
  for (const auto& p : sk.points) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 2.0);
  }
  CHECK(sk.times.back() == 0.6);
}

TEST_CASE("Feynman-Kac functional") {
  const BridgeSampler s(StableKernel(1, 1.5), PathGeometry::free());
  const auto sk = s.sample(Point{0.0}, Point{0.4}, 2.0, 16, 3);
  CHECK(fk_functional(sk, [](const Point&) { return 0.0; }) == 1.0);
  CHECK(fk_functional(sk, [](const Point&) { return 0.7; }) == Approx(std::exp(-1.4)).epsilon(1e-14));
  // a skeleton that stays away from B(0, 1/4)
  BridgeSkeleton far;
  far.t = 1.0;
  far.n = 4;
  for (int j = 0; j <= 4; ++j) {
    far.times.push_back(0.25 * j);
    far.points.push_back(Point{0.5 + 0.1 * j});
  }
  std::vector<double> q(10, 3.0);
  const AlloyPotential pot(SingleSiteProfile::indicator(0.25, 1.0),
                           DisorderField(CouplingDistribution::bernoulli(0.5, 3.0), LatticeBox::cube(1, -5, 5), 0, q, true));
  std::vector<double> zero_q(10, 0.0);
  zero_q[5] = 3.0;  // only site 0 charged
  const AlloyPotential one(SingleSiteProfile::indicator(0.25, 1.0),
                           DisorderField(CouplingDistribution::bernoulli(0.5, 3.0), LatticeBox::cube(1, -5, 5), 0, zero_q, true));
  CHECK(fk_functional(far, one) == 1.0);
  CHECK(fk_functional(far, pot) < 1.0);
}

TEST_CASE("Laplace estimate with zero potential is the diagonal density") {
  PotentialLaw law;
  law.dist = CouplingDistribution::unchecked_point_masses({{0.0, 1.0}});
  LaplaceBudget b;
  b.n_disorder = 4;
  b.n_paths = 4;
  b.n_steps = 8;
  for (double a : {1.0, 1.7}) {
    const StableKernel k(1, a);
    const auto e = estimate_laplace(k, law, 0.8, b);
    CHECK(e.mean == Approx(k.density(0.8, Point{0.0})).epsilon(1e-14));
    CHECK(e.std_error == 0.0);
  }
}

TEST_CASE("Laplace estimate with a constant potential") {
  // couplings ≡ 2 with an indicator of radius 1/2: V = 2 off a null set
  PotentialLaw law;
  law.profile = SingleSiteProfile::indicator(0.5, 1.0);
  law.dist = CouplingDistribution::unchecked_point_masses({{2.0, 1.0}});
  LaplaceBudget b;
  b.n_disorder = 3;
  b.n_paths = 20;
  b.n_steps = 16;
  const StableKernel k(1, 1.2);
  const auto e = estimate_laplace(k, law, 0.5, b, PathGeometry::torus(1));
  TorusKernel tk(k, 1);
  CHECK(e.mean == Approx(tk.density(0.5, Point{0.0}, Point{0.0}) * std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("Laplace estimate is independent of the worker count") {
  PotentialLaw law;
  law.dist = CouplingDistribution::bernoulli(0.5, 5.0);
  LaplaceBudget b;
  b.n_disorder = 12;
  b.n_paths = 3;
  b.n_steps = 16;
  b.seed = 77;
  const StableKernel k(1, 1.5);
  b.workers = 1;
  const auto one = estimate_laplace(k, law, 1.0, b, PathGeometry::torus(1));
  b.workers = 4;
  const auto four = estimate_laplace(k, law, 1.0, b, PathGeometry::torus(1));
  CHECK(std::memcmp(&one.mean, &four.mean, sizeof(double)) == 0);
  CHECK(std::memcmp(&one.std_error, &four.std_error, sizeof(double)) == 0);
}

TEST_CASE("exhaustive disorder enumeration needs a small finite torus") {
  PotentialLaw law;
  LaplaceBudget b;
  b.exhaustive = true;
  const StableKernel k(1, 1.0);
  CHECK_THROWS_AS(estimate_laplace(k, law, 1.0, b), ConfigurationError);
  law.dist = CouplingDistribution::uniform(1.0);
  CHECK_THROWS_AS(estimate_laplace(k, law, 1.0, b, PathGeometry::torus(1)), ModeError);
}

TEST_CASE("bridge fold with A = whole space is the fold identity") {
  for (double a : {1.0, 2.0}) {
    const auto r = bridge_fold_check(StableKernel(1, a), 0.0, 0.3, 1.0, 1, 0.0, 0.5, 1000, 3);
    CHECK(r.fold_fourier == Approx(r.fold_sum).epsilon(1e-8));
  }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(sample_stable_increment(1, 1.0, 0.0, 1), DomainError);
  CHECK_THROWS_AS(BridgeSampler(StableKernel(2, 1.0), PathGeometry::free()), ConfigurationError);
  CHECK_THROWS_AS(sample_bridge(StableKernel(1, 1.0), Point{0.0}, Point{0.0}, 1.0, 1, 0), DomainError);
}
