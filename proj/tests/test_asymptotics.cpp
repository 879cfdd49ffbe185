#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "lifschitz/asymptotics.hpp"
#include "lifschitz/errors.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/spectral.hpp"

using namespace lifschitz;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

// synthetic IDS ℓ(λ) = exp(c λ^{−d/α}) with c the plateau value
IdsCurve synthetic_ids(double c, int d, double alpha, const std::vector<double>& lambdas) {
  IdsCurve curve;
  curve.lambdas = lambdas;
  curve.volume = 16.0;
  curve.n_disorder = 1000;
  curve.modes = 256;
  for (double l : lambdas) {
    curve.values.push_back(std::exp(c * std::pow(l, -d / alpha)));
    curve.std_errors.push_back(1e-3 * curve.values.back());
    curve.hits.push_back(1000);
  }
  return curve;
}
}  // namespace

TEST_CASE("free torus IDS is the multiplier count") {
  const int m = 4, n = 64;
  const auto ev = all_eigenvalues(build_torus_operator_from_samples(1, m, n, 2.0, std::vector<double>(n, 0.0)));
  const auto grid = log_grid(0.5, 200.0, 25);
  const auto curve = ids_estimate(std::vector<std::vector<double>>{ev, ev}, m, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    long count = 0;
    for (int k = -n / 2; k < n / 2; ++k) count += std::pow(2.0 * kPi * k / m, 2.0) <= grid[i] * (1 + 1e-12);
    CHECK(curve.values[i] == Approx(static_cast<double>(count) / m));
    CHECK(curve.std_errors[i] == 0.0);
  }
}

TEST_CASE("IDS below the spectrum vanishes; more disorder stays consistent") {
  const int m = 4, n = 32;
  const auto dist = CouplingDistribution::bernoulli(0.5, 2.0);
  const auto profile = SingleSiteProfile::indicator();
  const auto base = build_torus_operator_from_samples(1, m, n, 1.0, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> spectra;
  double lowest = 1e300;
  for (std::uint64_t s = 0; s < 400; ++s) {
    AlloyPotential pot(profile, sample_disorder(dist, LatticeBox::cube(1, 0, m), derive_key({5, s})),
                       PotentialMode::periodized(m));
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = pot(base.nodes()[i]);
    spectra.push_back(all_eigenvalues(base.with_potential(v)));
    lowest = std::min(lowest, spectra.back().front());
  }
  const std::vector<double> grid{0.5 * lowest, 0.9 * lowest, 1.0, 3.0, 10.0};
  const std::vector<std::vector<double>> half(spectra.begin(), spectra.begin() + 200);
  const auto all = ids_estimate(spectra, m, grid);
  const auto part = ids_estimate(half, m, grid);
  CHECK(all.values[0] == 0.0);
  CHECK(all.values[1] == 0.0);
  for (std::size_t i = 2; i < grid.size(); ++i)
    CHECK(std::abs(all.values[i] - part.values[i]) <= 3.0 * std::hypot(all.std_errors[i], part.std_errors[i]) + 1e-15);
  CHECK_THROWS_AS(ids_estimate(std::vector<std::vector<double>>{spectra[0]}, m, grid), DomainError);
}

TEST_CASE("Laplace transform from spectra") {
  const std::vector<double> ts{0.1, 1.0, 7.0};
  auto l = laplace_from_spectrum(std::vector<std::vector<double>>{{0.0}, {0.0}}, 1.0, ts);
  for (double v : l.values) CHECK(v == 1.0);
  const std::vector<double> ev{0.3, 1.1, 2.5};
  std::vector<double> shifted = ev;
  for (double& e : shifted) e += 0.4;
  const auto a = laplace_from_spectrum(std::vector<std::vector<double>>{ev, ev}, 2.0, ts);
  const auto b = laplace_from_spectrum(std::vector<std::vector<double>>{shifted, shifted}, 2.0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(b.values[i] == Approx(a.values[i] * std::exp(-0.4 * ts[i])).epsilon(1e-14));
}

TEST_CASE("aggregator matches the batch estimators and merges in order") {
  const std::vector<double> lam{0.5, 1.0, 2.0}, ts{1.0, 2.0};
  const std::vector<std::vector<double>> sp{{0.2, 0.9, 3.0}, {0.6, 1.5, 2.2}, {0.1, 0.4, 5.0}};
  SpectrumAggregator whole(3.0, lam, ts), a(3.0, lam, ts), b(3.0, lam, ts);
  for (const auto& s : sp) whole.add(s);
  a.add(sp[0]);
  b.add(sp[1]);
  b.add(sp[2]);
  a.merge(b);
  const auto batch = ids_estimate(sp, 3.0, lam);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    CHECK(whole.ids().values[i] == Approx(batch.values[i]));
    CHECK(a.ids().values[i] == whole.ids().values[i]);
  }
  CHECK(a.laplace().values[1] == whole.laplace().values[1]);
  SpectrumAggregator other(3.0, {0.5}, ts);
  CHECK_THROWS_AS(a.merge(other), ConfigurationError);
}

TEST_CASE("Lifschitz fit: theory constants") {
  const auto lambdas = log_grid(0.01, 0.1, 10);
  const double c = -1.0887930451518010653;  // mpmath: −ln 2 · π/2
  const auto fit = fit_lifschitz(synthetic_ids(c, 1, 2.0, lambdas), 1, 2.0, 0.5);
  CHECK(fit.theory_constant == Approx(c).epsilon(1e-12));
  CHECK(fit.theory_constant_volume == Approx(2.0 * c).epsilon(1e-12));
  CHECK(fit.exponent_target == Approx(0.5));
  CHECK(fit.constant == Approx(c).epsilon(1e-12));
  const auto uni = fit_lifschitz(synthetic_ids(-1.0, 1, 2.0, lambdas), 1, 2.0, 0.0);
  CHECK(uni.theory_constant == -std::numeric_limits<double>::infinity());
}

TEST_CASE("Lifschitz fit: trend detection") {
  const auto lambdas = log_grid(0.01, 0.1, 12);
  // g(λ) = −1 − ln(1/λ)/4 falls as λ ↓ 0 (no plateau)
  IdsCurve curve = synthetic_ids(-1.0, 1, 2.0, lambdas);
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    curve.values[i] = std::exp((-1.0 + 0.25 * std::log(lambdas[i])) / std::sqrt(lambdas[i]));
  const auto fit = fit_lifschitz(curve, 1, 2.0, 0.0);
  CHECK(fit.trend_p < 0.05);
  for (std::size_t i = 1; i < fit.plateau.size(); ++i) CHECK(fit.plateau[i] > fit.plateau[i - 1]);
  // a flat plateau shows no trend
  const auto flat = fit_lifschitz(synthetic_ids(-1.0, 1, 2.0, lambdas), 1, 2.0, 0.5);
  CHECK(flat.trend_p > 0.05);
}

TEST_CASE("Lifschitz fit: free IDS has a vanishing plateau") {
  // ℓ(λ) = λ^{1/2}/π, g(λ) = λ^{1/2} ln ℓ → 0
  const auto lambdas = log_grid(1e-4, 1e-3, 8);
  IdsCurve curve = synthetic_ids(-1.0, 1, 2.0, lambdas);
  for (std::size_t i = 0; i < lambdas.size(); ++i) curve.values[i] = std::sqrt(lambdas[i]) / kPi;
  const auto fit = fit_lifschitz(curve, 1, 2.0, 1.0);
  CHECK(std::abs(fit.constant) < 0.1);
}

TEST_CASE("Lifschitz fit needs data on the window") {
  IdsCurve empty = synthetic_ids(-1.0, 1, 2.0, log_grid(0.01, 0.1, 5));
  for (double& v : empty.values) v = 0.0;
  for (long& h : empty.hits) h = 0;
  CHECK_THROWS_AS(fit_lifschitz(empty, 1, 2.0, 0.5), InsufficientStatisticsError);
}

TEST_CASE("Laplace exponent targets and round trip") {
  LaplaceCurve curve;
  const double pref = -3.1720400635373377853;  // mpmath: −4.05 (ln 2)^{2/3}
  for (double t : log_grid(1.0, 1e3, 31)) {
    curve.ts.push_back(t);
    curve.values.push_back(std::exp(pref * std::cbrt(t)));
    curve.std_errors.push_back(0.0);
  }
  const auto fit = fit_laplace_exponent(curve, 1, 2.0, 0.5);
  CHECK(fit.slope_target == Approx(1.0 / 3.0));
  CHECK(std::abs(fit.slope - 1.0 / 3.0) < 0.01);
  CHECK(fit.prefactor == Approx(pref).epsilon(0.01));
  LaplaceCurve one = curve;
  CHECK(fit_laplace_exponent(one, 1, 1.0, 0.5).slope_target == Approx(0.5));
  LaplaceCurve short_range;
  short_range.ts = {1.0, 2.0, 4.0};
  short_range.values = {0.5, 0.4, 0.3};
  short_range.std_errors = {0.0, 0.0, 0.0};
  CHECK_THROWS(fit_laplace_exponent(short_range, 1, 2.0, 0.5));
}

TEST_CASE("Tauberian cross-check") {
  const double lam = kPi * kPi / 4.0;
  const double c_lap = -rate_constant(1, 2.0, lam) * std::pow(std::log(2.0), 2.0 / 3.0);
  // exact Laplace prefactor maps to −ω_1 ln 2 (λ_1)^{1/2}
  CHECK(tauberian_eigen_constant(c_lap, 1, 2.0) == Approx(-2.0 * std::log(2.0) * kPi / 2.0).epsilon(1e-12));

  LifschitzFit eig;
  eig.constant = -std::log(2.0) * kPi;
  eig.constant_error = 0.01;
  eig.f0 = 0.5;
  LaplaceFit lap;
  lap.f0 = 0.5;
  lap.prefactor = c_lap;
  lap.prefactor_se = 0.01;
  const auto ok = tauberian_crosscheck(eig, lap, 1, 2.0);
  CHECK(ok.consistent);
  CHECK(std::abs(ok.residual) < 1e-12);
  lap.prefactor = 1.2 * c_lap;
  CHECK_FALSE(tauberian_crosscheck(eig, lap, 1, 2.0).consistent);
  eig.f0 = 0.0;
  CHECK_FALSE(tauberian_crosscheck(eig, lap, 1, 2.0).numeric);
}

TEST_CASE("vacancy event probability") {
  CHECK(lower_bound_event_prob(1.0, 7.0, 0.25, 1) == 1.0);
  CHECK(lattice_count(2.0, 0.25, 1) == 5);
  CHECK(lower_bound_event_prob(CouplingDistribution::bernoulli(0.5, 1.0), 2.0, 0.25, 1) == Approx(1.0 / 32.0));
  double prev = 1.0;
  for (double r : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double p = lower_bound_event_prob(0.5, r, 0.25, 2);
    CHECK(p <= prev);
    prev = p;
  }
}
